#pragma once

#include "sdrelax/densities.hpp"
#include "sdrelax/fields.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sdrelax {

// Density registry. Names are the ones accepted in experiment configs.
BulkDensity bulk_density(const std::string &name, double exponent = 2.0);
SurfaceDensity surface_density(const std::string &name);
InterfacePairDensity pair_density(const std::string &name);
std::vector<std::string> bulk_density_names();
std::vector<std::string> surface_density_names();
std::vector<std::string> pair_density_names();

/// W(A) = |A - C|^2 with Frobenius norm.
BulkDensity quadratic_about(const Mat &C);

/// int W(grad u) dx + sum over facets of Psi([u], nu) * area. The boundary
/// clamp is not part of E; see clamp_energy.
double energy(const PiecewiseField &u, const DensitySet &ds);

enum class CheckStatus { pass, warn, fail };
const char *to_string(CheckStatus s);

struct CheckResult {
    std::string hypothesis;  // "H1", "H2-lower", ...
    CheckStatus status = CheckStatus::pass;
    double worst = 0.0;      // largest violation (or ratio for H1)
    std::string witness;     // sample attaining it
};

struct HypothesisReport {
    std::string density;
    std::vector<CheckResult> checks;

    bool passed() const;  // no check failed; warnings allowed
    const CheckResult &get(const std::string &hypothesis) const;
};

struct SamplingOptions {
    int samples = 10000;
    double radius = 10.0;
    double rel_tol = 1e-9;
    int dim = 3;
    std::uint64_t seed = 0;
};

HypothesisReport check_H1(const BulkDensity &W, const SamplingOptions &opt = {});
HypothesisReport check_H2_H3_H4(const SurfaceDensity &psi, const SamplingOptions &opt = {});
HypothesisReport check_H5_to_H8(const InterfacePairDensity &psi2, const SamplingOptions &opt = {});

}  // namespace sdrelax
