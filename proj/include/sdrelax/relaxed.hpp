#pragma once

#include "sdrelax/cell.hpp"
#include "sdrelax/fields.hpp"

#include <functional>
#include <string>

namespace sdrelax {

enum class Provenance { exact_expl, cell_estimated };
const char *to_string(Provenance p);

/// Bulk and surface densities of the relaxed energy I(g, G).
struct RelaxedDensityPair {
    std::string name;
    std::function<double(const Mat &, const Mat &)> H;
    std::function<double(const Vec &, const Vec &)> h;
    Provenance provenance = Provenance::exact_expl;
};

// Closed forms for the purely interfacial densities |l.n| and (l.n)^+-.
RelaxedDensityPair exact_abs_pair();
RelaxedDensityPair exact_plus_pair();
RelaxedDensityPair exact_minus_pair();

/// Densities from the cell solvers; every value is an upper bound.
RelaxedDensityPair cell_estimated_pair(const DensitySet &ds, const OptimizerBudget &budget = {});

/// sum over cells of H(grad g, G) * volume + sum over facets of h([g], nu) * area.
double relaxed_energy(const StructuredDeformation &sd, const RelaxedDensityPair &pair);

/// int tr(grad g - G) dx.
double tr_M_integral(const StructuredDeformation &sd);

/// sum over facets of [g].nu * area.
double normal_jump_integral(const StructuredDeformation &sd);

struct VpmReport {
    double V_abs = 0.0, V_plus = 0.0, V_minus = 0.0;
    double tr_M = 0.0;
    double normal_jump = 0.0;
    // Relative residuals of V^+- = V/2 +- (tr_M + normal_jump)/2.
    double residual_plus = 0.0, residual_minus = 0.0;
    // Same with tr_M alone; equals the above when g has no jumps.
    double printed_residual_plus = 0.0, printed_residual_minus = 0.0;
    double sum_residual = 0.0;  // |V^+ + V^- - V|
    bool holds = true;
};

/// Evaluates V^|.|, V^+ and V^- with the exact densities and checks the
/// identities linking them. Throws NumericalError when they fail.
VpmReport verify_vpm_identity(const StructuredDeformation &sd, double rel_tol = 1e-9);

}  // namespace sdrelax
