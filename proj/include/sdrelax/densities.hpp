#pragma once

#include "sdrelax/core.hpp"

#include <functional>
#include <string>

namespace sdrelax {

/// Bulk density W(A) >= 0 with its declared growth exponent and the
/// Lipschitz-type constant of |W(A)-W(B)| <= C|A-B|(1+|A|^{p-1}+|B|^{p-1}).
struct BulkDensity {
    std::string name;
    std::function<double(const Mat &)> eval;
    double growth_p = 2.0;
    double lipschitz_C = 1.0;

    double operator()(const Mat &A) const { return eval(A); }
    bool is_zero() const { return name == "zero"; }
};

/// Surface energy density Psi(lambda, nu), declared to satisfy
/// c1 |lambda| <= Psi <= C1 |lambda|.
struct SurfaceDensity {
    std::string name;
    std::function<double(const Vec &, const Vec &)> eval;
    double c1 = 0.0;
    double C1 = 1.0;

    double operator()(const Vec &lambda, const Vec &nu) const { return eval(lambda, nu); }
};

/// Interface density Psi2(a, b, c, d, nu) charged where the phase interface
/// and the jump set of the deformation overlap. a, b are the phase traces,
/// c, d the deformation traces on the + and - side.
struct InterfacePairDensity {
    std::string name;
    std::function<double(int, int, const Vec &, const Vec &, const Vec &)> eval;
    double bound_C = 1.0;

    double operator()(int a, int b, const Vec &c, const Vec &d, const Vec &nu) const {
        return eval(a, b, c, d, nu);
    }
};

struct DensitySet {
    BulkDensity W;
    SurfaceDensity psi;
};

/// Densities of the two-phase fractured medium: phase i uses (W^i, Psi^i_1);
/// Psi2 lives on the overlap of phase interfaces and cracks.
struct DesignDensitySet {
    BulkDensity W0, W1;
    SurfaceDensity psi0, psi1;
    InterfacePairDensity psi2;

    DensitySet phase(int i) const { return i == 0 ? DensitySet{W0, psi0} : DensitySet{W1, psi1}; }
    const SurfaceDensity &surface(int i) const { return i == 0 ? psi0 : psi1; }
    const BulkDensity &bulk(int i) const { return i == 0 ? W0 : W1; }
};

}  // namespace sdrelax
