#include "sdrelax/serialization.hpp"

namespace sdrelax {

namespace {

template <class F>
auto parse(const char *what, F &&f) {
    try {
        return f();
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(std::string("malformed ") + what + ": " + e.what());
    }
}

Json affine_to_json(const Affine &a) { return {{"gradient", to_json(a.gradient)}, {"offset", to_json(a.offset)}}; }

Affine affine_from_json(const Json &j) { return {mat_from_json(j.at("gradient")), vec_from_json(j.at("offset"))}; }

}  // namespace

Json to_json(const Mat &m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const Vec &v) {
    Json out = Json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Mat mat_from_json(const Json &j) {
    return parse("matrix", [&] {
        if (!j.is_array() || j.empty() || j.size() > 3 || !j[0].is_array() || j[0].empty() || j[0].size() > 3)
            throw InvalidArgument("matrix must be a non-empty array of at most 3 rows of at most 3 numbers");
        Mat m(j.size(), j[0].size());
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (j[i].size() != j[0].size()) throw InvalidArgument("matrix rows have different lengths");
            for (std::size_t k = 0; k < j[i].size(); ++k) m(i, k) = j[i][k].get<double>();
        }
        if (!is_finite(m)) throw InvalidArgument("matrix entries must be finite");
        return m;
    });
}

Vec vec_from_json(const Json &j) {
    return parse("vector", [&] {
        if (j.is_number()) return Vec(Vec::Constant(1, j.get<double>()));
        if (!j.is_array() || j.empty() || j.size() > 3)
            throw InvalidArgument("vector must be an array of 1 to 3 numbers");
        Vec v(j.size());
        for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
        if (!is_finite(v)) throw InvalidArgument("vector entries must be finite");
        return v;
    });
}

Json field_to_json(const PiecewiseField &u) {
    const GridMesh &mesh = u.mesh();
    Json domain = {{"lo", to_json(mesh.box().lo)}, {"hi", to_json(mesh.box().hi)}};
    if (mesh.is_rotated()) domain["rotation"] = to_json(mesh.rotation());
    Json cells = Json::array();
    for (const auto &c : u.cells()) cells.push_back(affine_to_json(c));
    Json facets = Json::array();
    for (const auto &f : u.facets()) {
        Json polygon = Json::array();
        for (const auto &v : f.polygon.vertices) polygon.push_back(to_json(v));
        facets.push_back({{"normal", to_json(f.normal)}, {"offset_c", f.offset}, {"polygon", polygon}, {"jump", to_json(f.jump)}});
    }
    Json out = {{"version", kFieldFormatVersion},
                {"dim", mesh.dim()},
                {"domain", domain},
                {"resolution", mesh.is_uniform() ? Json(mesh.resolution()) : Json(mesh.counts())},
                {"cells", cells},
                {"facets", facets}};
    if (u.trace()) out["trace"] = affine_to_json(*u.trace());
    return out;
}

PiecewiseField field_from_json(const Json &j) {
    return parse("field", [&] {
        const int version = j.value("version", kFieldFormatVersion);
        if (version != kFieldFormatVersion)
            throw InvalidArgument("unsupported field format version " + std::to_string(version));
        const int dim = j.at("dim").get<int>();
        require_dim(dim);
        const Json &domain = j.at("domain");
        geometry::Box box{vec_from_json(domain.at("lo")), vec_from_json(domain.at("hi"))};
        if (box.dim() != dim) throw InvalidArgument("domain dimension does not match dim");
        std::optional<Mat> rotation;
        if (domain.contains("rotation")) rotation = mat_from_json(domain.at("rotation"));
        const Json &res = j.at("resolution");
        std::vector<int> counts = res.is_array() ? res.get<std::vector<int>>() : std::vector<int>(dim, res.get<int>());
        GridMesh mesh(box, counts, rotation);
        std::vector<Affine> cells;
        for (const auto &c : j.at("cells")) cells.push_back(affine_from_json(c));
        if (cells.empty()) throw InvalidArgument("field has no cells");
        std::vector<JumpFacet> facets;
        for (const auto &f : j.value("facets", Json::array())) {
            JumpFacet facet;
            facet.normal = vec_from_json(f.at("normal"));
            facet.offset = f.at("offset_c").get<double>();
            facet.jump = vec_from_json(f.at("jump"));
            if (f.contains("polygon")) {
                facet.polygon.dim = dim;
                for (const auto &v : f.at("polygon")) facet.polygon.vertices.push_back(vec_from_json(v));
            }
            facets.push_back(std::move(facet));
        }
        std::optional<Affine> trace;
        if (j.contains("trace")) trace = affine_from_json(j.at("trace"));
        return PiecewiseField(std::move(mesh), std::move(cells), std::move(facets), std::move(trace));
    });
}

Json sd_to_json(const StructuredDeformation &sd) {
    Json G = Json::array();
    for (const auto &m : sd.G) G.push_back(to_json(m));
    return {{"g", field_to_json(sd.g)}, {"G", G}};
}

StructuredDeformation sd_from_json(const Json &j) {
    return parse("structured deformation", [&] {
        PiecewiseField g = field_from_json(j.at("g"));
        std::vector<Mat> G;
        const Json &jg = j.at("G");
        // A single matrix stands for a constant G.
        if (jg.is_array() && !jg.empty() && jg[0].is_array() && !jg[0].empty() && jg[0][0].is_number())
            G.assign(g.mesh().cell_count(), mat_from_json(jg));
        else
            for (const auto &m : jg) G.push_back(mat_from_json(m));
        return StructuredDeformation(std::move(g), std::move(G));
    });
}

}  // namespace sdrelax
