#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace sdrelax {

using Objective = std::function<double(const std::vector<double> &)>;

struct NelderMeadOptions {
    int max_iterations = 400;
    double simplex_tolerance = 1e-12;
    double initial_step = 0.5;
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free simplex search started at x0. A zero-dimensional problem
/// is evaluated once.
MinimizeResult nelder_mead(const Objective &f, std::vector<double> x0, const NelderMeadOptions &opt = {});

/// Start points for multi-start runs: the origin first, then uniform draws in
/// [lo, hi]^dim from a fixed-seed generator. The sequence for count k is a
/// prefix of the sequence for count k + 1.
std::vector<std::vector<double>> start_points(int dim, int count, double lo, double hi, std::uint64_t seed);

}  // namespace sdrelax
