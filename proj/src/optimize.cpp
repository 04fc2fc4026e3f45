#include "sdrelax/optimize.hpp"

#include "sdrelax/core.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>
#include <memory>
#include <random>

namespace sdrelax {

namespace {

struct Bridge {
    const Objective *f;
    std::vector<double> scratch;
};

double trampoline(const gsl_vector *v, void *params) {
    auto *b = static_cast<Bridge *>(params);
    for (std::size_t i = 0; i < b->scratch.size(); ++i) b->scratch[i] = gsl_vector_get(v, i);
    const double value = (*b->f)(b->scratch);
    // GSL cannot order NaN; a non-finite value is treated as a wall.
    return std::isfinite(value) ? value : std::numeric_limits<double>::max();
}

struct VectorDeleter {
    void operator()(gsl_vector *v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
    void operator()(gsl_multimin_fminimizer *m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace

MinimizeResult nelder_mead(const Objective &f, std::vector<double> x0, const NelderMeadOptions &opt) {
    if (opt.max_iterations < 1 || !(opt.simplex_tolerance > 0.0) || !(opt.initial_step > 0.0))
        throw InvalidArgument("nelder_mead: iteration budget, tolerance and step must be positive");
    const std::size_t n = x0.size();
    if (n == 0) return {x0, f(x0), 0, true};

    static const bool handler_off = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)handler_off;

    Bridge bridge{&f, std::vector<double>(n)};
    gsl_multimin_function fn{&trampoline, n, &bridge};
    std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n)), step(gsl_vector_alloc(n));
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set_all(step.get(), opt.initial_step);
    std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
    if (gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), step.get()) != GSL_SUCCESS)
        throw NumericalError("nelder_mead: could not initialise the simplex");

    MinimizeResult r;
    for (r.iterations = 1; r.iterations <= opt.max_iterations; ++r.iterations) {
        if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), opt.simplex_tolerance) == GSL_SUCCESS) {
            r.converged = true;
            break;
        }
    }
    const gsl_vector *best = gsl_multimin_fminimizer_x(m.get());
    r.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.x[i] = gsl_vector_get(best, i);
    r.value = f(r.x);
    return r;
}

std::vector<std::vector<double>> start_points(int dim, int count, double lo, double hi, std::uint64_t seed) {
    std::vector<std::vector<double>> out;
    if (count < 1) return out;
    out.emplace_back(dim, 0.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    for (int k = 1; k < count; ++k) {
        std::vector<double> p(dim);
        for (auto &v : p) v = u(rng);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace sdrelax
