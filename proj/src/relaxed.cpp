#include "sdrelax/relaxed.hpp"

#include "sdrelax/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdrelax {

const char *to_string(Provenance p) { return p == Provenance::exact_expl ? "exact_expl" : "cell_estimated"; }

RelaxedDensityPair exact_abs_pair() {
    return {"abs", [](const Mat &A, const Mat &B) { return exact_H_abs(A, B); },
            [](const Vec &l, const Vec &n) { return exact_h_abs(l, n); }, Provenance::exact_expl};
}

RelaxedDensityPair exact_plus_pair() {
    return {"plus", [](const Mat &A, const Mat &B) { return exact_H_plus(A, B); },
            [](const Vec &l, const Vec &n) { return exact_h_plus(l, n); }, Provenance::exact_expl};
}

RelaxedDensityPair exact_minus_pair() {
    return {"minus", [](const Mat &A, const Mat &B) { return exact_H_minus(A, B); },
            [](const Vec &l, const Vec &n) { return exact_h_minus(l, n); }, Provenance::exact_expl};
}

RelaxedDensityPair cell_estimated_pair(const DensitySet &ds, const OptimizerBudget &budget) {
    return {"cell:" + ds.psi.name, [ds, budget](const Mat &A, const Mat &B) { return estimate_H(A, B, ds, budget).value; },
            [ds, budget](const Vec &l, const Vec &n) { return estimate_h(l, n, ds.psi, budget).value; },
            Provenance::cell_estimated};
}

double relaxed_energy(const StructuredDeformation &sd, const RelaxedDensityPair &pair) {
    const double vol = sd.g.mesh().volume() / sd.g.mesh().cell_count();
    double bulk = 0.0;
    for (int c = 0; c < sd.g.mesh().cell_count(); ++c) bulk += pair.H(sd.grad_g(c), sd.G[c]) * vol;
    double surface = 0.0;
    for (const auto &f : sd.g.facets()) surface += pair.h(f.jump, f.normal) * f.area();
    const double total = bulk + surface;
    if (!std::isfinite(total)) throw NumericalError("relaxed energy is not finite");
    return total;
}

double tr_M_integral(const StructuredDeformation &sd) {
    const double vol = sd.g.mesh().volume() / sd.g.mesh().cell_count();
    double total = 0.0;
    for (int c = 0; c < sd.g.mesh().cell_count(); ++c) total += trace_difference(sd.grad_g(c), sd.G[c]) * vol;
    return total;
}

double normal_jump_integral(const StructuredDeformation &sd) {
    double total = 0.0;
    for (const auto &f : sd.g.facets()) total += f.jump.dot(f.normal) * f.area();
    return total;
}

VpmReport verify_vpm_identity(const StructuredDeformation &sd, double rel_tol) {
    VpmReport r;
    r.V_abs = relaxed_energy(sd, exact_abs_pair());
    r.V_plus = relaxed_energy(sd, exact_plus_pair());
    r.V_minus = relaxed_energy(sd, exact_minus_pair());
    r.tr_M = tr_M_integral(sd);
    r.normal_jump = normal_jump_integral(sd);

    const double signed_total = r.tr_M + r.normal_jump;
    const double scale = std::max(std::abs(r.V_abs), std::abs(r.tr_M) + std::abs(r.normal_jump));
    auto rel = [&](double x) { return scale > 0.0 ? std::abs(x) / scale : std::abs(x); };
    r.residual_plus = rel(r.V_plus - 0.5 * r.V_abs - 0.5 * signed_total);
    r.residual_minus = rel(r.V_minus - 0.5 * r.V_abs + 0.5 * signed_total);
    r.printed_residual_plus = rel(r.V_plus - 0.5 * r.V_abs - 0.5 * r.tr_M);
    r.printed_residual_minus = rel(r.V_minus - 0.5 * r.V_abs + 0.5 * r.tr_M);
    r.sum_residual = std::abs(r.V_plus + r.V_minus - r.V_abs);
    r.holds = r.residual_plus <= rel_tol && r.residual_minus <= rel_tol &&
              r.sum_residual <= 1e-12 * std::max(1.0, std::abs(r.V_abs));
    if (!r.holds) {
        std::ostringstream os;
        os.precision(17);
        os << "V+- identity fails: V " << r.V_abs << " V+ " << r.V_plus << " V- " << r.V_minus << " int tr M "
           << r.tr_M << " int [g].nu " << r.normal_jump;
        throw NumericalError(os.str());
    }
    return r;
}

}  // namespace sdrelax
