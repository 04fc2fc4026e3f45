#pragma once

#include "sdrelax/fields.hpp"

#include <json.hpp>

namespace sdrelax {

using Json = nlohmann::json;

inline constexpr int kFieldFormatVersion = 1;

Json to_json(const Mat &m);
Json to_json(const Vec &v);
Mat mat_from_json(const Json &j);
Vec vec_from_json(const Json &j);

/// {version, dim, domain {lo, hi, rotation?}, resolution, cells [{gradient, offset}],
///  facets [{normal, offset_c, polygon, jump}], trace?}
Json field_to_json(const PiecewiseField &u);
PiecewiseField field_from_json(const Json &j);

Json sd_to_json(const StructuredDeformation &sd);
StructuredDeformation sd_from_json(const Json &j);

}  // namespace sdrelax
