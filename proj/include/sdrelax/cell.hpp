#pragma once

#include "sdrelax/densities.hpp"
#include "sdrelax/fields.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sdrelax {

struct OptimizerBudget {
    int restarts = 8;
    int max_iterations = 400;
    double simplex_tolerance = 1e-12;
    std::vector<int> n_schedule{4, 8, 16};
    std::uint64_t seed = 0;

    void validate() const;
};

/// Energy of a realized competitor (interior energy plus boundary clamp).
struct RealizedEnergy {
    int n = 0;
    double interior = 0.0;
    double clamp = 0.0;
    double total() const { return interior + clamp; }
};

/// Best competitor found for a cell problem. `value` is an upper bound on
/// the infimum; for the bulk problem it is the limit n -> infinity of the
/// realized staircase energies listed in `realized`.
struct CellSolution {
    double value = 0.0;
    Frame frame;
    double frame_value = 0.0;              // cost of `frame`, within 1e-10 of value for ties
    std::optional<Laminate> laminate;
    std::vector<JumpSplit> splits;         // surface problem, parallel family
    std::vector<double> apex;              // surface problem, oblique family
    int refinement_n = 0;
    std::vector<RealizedEnergy> realized;
    std::string competitor;                // human-readable description
    std::optional<PiecewiseField> competitor_field;
    std::string bound_kind = "upper";
};

/// Upper bound on H(A, B) over orthonormal-frame staircases (with a
/// two-gradient laminate when W is not zero).
CellSolution estimate_H(const Mat &A, const Mat &B, const DensitySet &ds, const OptimizerBudget &budget = {});

/// Brute-force minimum of frame_cost over a uniform grid of Givens angles,
/// covering one period of the cost: theta in [0, pi/2) in 2D; angle ranges
/// [0, pi) x [-pi/2, pi/2) x [0, pi) in 3D. Assumes Psi(-l, -n) = Psi(l, n).
double frame_oracle(const Mat &M, const SurfaceDensity &psi, int grid_resolution);

/// Argmin of the same grid search.
Frame frame_oracle_argmin(const Mat &M, const SurfaceDensity &psi, int grid_resolution);

int default_oracle_resolution(int dim);

/// Upper bound on h(lambda, nu) over single, parallel multi-jump and oblique
/// (tent in 2D, pyramid in 3D) competitors.
CellSolution estimate_h(const Vec &lambda, const Vec &nu, const SurfaceDensity &psi, const OptimizerBudget &budget = {});

/// Cost of the k-jump parallel competitor with the given fractions.
double parallel_jump_cost(const Vec &lambda, const Vec &nu, const std::vector<double> &fractions,
                          const SurfaceDensity &psi);

/// Cost of the oblique competitor whose jump surface is the graph over the
/// midplane of Q_nu through the given apex (local coordinates).
double oblique_jump_cost(const Vec &lambda, const Vec &nu, const std::vector<double> &apex, const SurfaceDensity &psi);

struct SandwichValues {
    double lower = 0.0;  // closed form
    double mid = 0.0;    // frame oracle
    double upper = 0.0;  // simplex estimate
    double mid_gap() const { return mid - lower; }
    double upper_gap() const { return upper - lower; }
};

struct ExplReport {
    SandwichValues abs, plus, minus;
    Frame frame;     // optimizer frame for the |.| case
    int refinement_n = 0;
};

struct ExplOptions {
    int oracle_resolution = 0;  // 0 selects the default for the dimension
    double tolerance = 1e-6;
    bool signed_variants = true;
};

/// Sandwich |tr(A-B)| <= frame oracle and <= simplex estimate, and the
/// same for the positive and negative parts. Throws NumericalError when a
/// lower bound is exceeded beyond tolerance.
ExplReport verify_expl(const Mat &A, const Mat &B, const OptimizerBudget &budget = {}, const ExplOptions &opt = {});

}  // namespace sdrelax
