#include <doctest.h>

#include "oracles.hpp"
#include "sdrelax/cell.hpp"
#include "sdrelax/energy.hpp"

#include <cmath>
#include <random>

using namespace sdrelax;

namespace {

const DensitySet kAbs{bulk_density("zero"), surface_density("abs_normal_jump")};

double brute_force_2d(const Mat &M, int samples) {
    double best = INFINITY;
    for (int k = 0; k < samples; ++k)
        best = std::min(best, oracle::abs_frame_cost(M, oracle::rotation({M_PI * k / samples})));
    return best;
}

}  // namespace

TEST_CASE("frame oracle on a traceless diagonal finds the diagonal frame") {
    Mat M(2, 2);
    M << 1.0, 0.0, 0.0, -1.0;
    CHECK(frame_cost(M, Frame::identity(2), kAbs.psi) == doctest::Approx(2.0));
    CHECK(frame_oracle(M, kAbs.psi, 720) <= 1e-15);
    const Frame f = frame_oracle_argmin(M, kAbs.psi, 720);
    CHECK(f.angles[0] == doctest::Approx(M_PI / 4));
}

TEST_CASE("frame oracle matches an independent angle scan") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 20; ++k) {
        const Mat M = oracle::random_matrix(rng, 2, 2, 2.0);
        CHECK(frame_oracle(M, kAbs.psi, 720) == doctest::Approx(brute_force_2d(M, 1440)).epsilon(1e-12));
    }
}

TEST_CASE("bulk cell value equals the trace bound for interfacial energies") {
    std::mt19937_64 rng(32);
    for (int dim = 1; dim <= 3; ++dim)
        for (int k = 0; k < 5; ++k) {
            const Mat A = oracle::random_matrix(rng, dim, dim), B = oracle::random_matrix(rng, dim, dim);
            const CellSolution s = estimate_H(A, B, kAbs);
            CHECK(s.bound_kind == "upper");
            CHECK(s.value >= exact_H_abs(A, B) - 1e-10);
            CHECK(s.value == doctest::Approx(exact_H_abs(A, B)).epsilon(1e-9));
            CHECK(s.realized.size() == 3);
            REQUIRE(s.competitor_field);
        }
    const Mat A = Mat::Identity(2, 2);
    CHECK(estimate_H(A, A, kAbs).value == 0.0);
}

TEST_CASE("realized competitor energies approach the cell value at rate 1/n") {
    std::mt19937_64 rng(33);
    OptimizerBudget budget;
    budget.n_schedule = {4, 8, 16, 32};
    for (int k = 0; k < 3; ++k) {
        const Mat A = oracle::random_matrix(rng, 2, 2), B = oracle::random_matrix(rng, 2, 2);
        const CellSolution s = estimate_H(A, B, kAbs, budget);
        for (std::size_t i = 1; i < s.realized.size(); ++i) {
            const double ratio = (s.realized[i - 1].total() - s.frame_value) / (s.realized[i].total() - s.frame_value);
            CHECK(ratio >= 1.5);
            CHECK(ratio <= 2.5);
        }
    }
}

TEST_CASE("larger budgets never raise the upper bound") {
    std::mt19937_64 rng(34);
    const DensitySet quad{bulk_density("quadratic_identity"), surface_density("norm_jump")};
    for (int k = 0; k < 4; ++k) {
        const int dim = 2 + k % 2;
        const Mat A = oracle::random_matrix(rng, dim, dim), B = oracle::random_matrix(rng, dim, dim);
        double prev = INFINITY;
        for (int restarts : {1, 2, 4, 8}) {
            OptimizerBudget b;
            b.restarts = restarts;
            const double v = estimate_H(A, B, quad, b).value;
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
        const Vec lambda = oracle::random_matrix(rng, dim, 1);
        const Vec nu = oracle::random_unit(rng, dim);
        prev = INFINITY;
        for (int restarts : {1, 2, 4, 8}) {
            OptimizerBudget b;
            b.restarts = restarts;
            const double v = estimate_h(lambda, nu, surface_density("squared_norm_jump"), b).value;
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("surface cell value for the normal-jump density is the single jump") {
    std::mt19937_64 rng(35);
    for (int dim = 1; dim <= 3; ++dim)
        for (int k = 0; k < 10; ++k) {
            const Vec lambda = oracle::random_matrix(rng, dim, 1, 3.0);
            const Vec nu = oracle::random_unit(rng, dim);
            const CellSolution s = estimate_h(lambda, nu, kAbs.psi);
            CHECK(std::abs(s.value - std::abs(lambda.dot(nu))) <= 1e-9);
            const double plus = estimate_h(lambda, nu, surface_density("positive_normal_jump")).value;
            const double minus_flip = estimate_h(Vec(-lambda), nu, surface_density("positive_normal_jump")).value;
            CHECK(std::abs(plus + minus_flip - s.value) <= 1e-9);
        }
}

TEST_CASE("splitting a jump never beats a single jump for subadditive densities") {
    std::mt19937_64 rng(36);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const char *name : {"abs_normal_jump", "norm_jump", "positive_normal_jump"}) {
        const SurfaceDensity psi = surface_density(name);
        for (int k = 0; k < 50; ++k) {
            const int dim = 1 + k % 3;
            const Vec lambda = oracle::random_matrix(rng, dim, 1, 3.0);
            const Vec nu = oracle::random_unit(rng, dim);
            std::vector<double> f(2 + k % 3);
            double sum = 0.0;
            for (auto &x : f) sum += (x = u(rng));
            for (auto &x : f) x /= sum;
            CHECK(parallel_jump_cost(lambda, nu, f, psi) >= psi(lambda, nu) - 1e-9);
        }
    }
}

TEST_CASE("splitting a jump helps for the squared density") {
    Vec lambda(2), nu(2);
    lambda << 1.0, 0.0;
    nu << 1.0, 0.0;
    const SurfaceDensity sq = surface_density("squared_norm_jump");
    CHECK(parallel_jump_cost(lambda, nu, {0.5, 0.5}, sq) == doctest::Approx(0.5));
    const CellSolution s = estimate_h(lambda, nu, sq);
    CHECK(s.value <= 0.25 + 1e-9);
    CHECK(s.value < sq(lambda, nu));
}

TEST_CASE("oblique competitor with a flat apex is the single jump") {
    Vec lambda(3), nu(3);
    lambda << 0.3, -1.0, 2.0;
    nu << 0.0, 0.6, 0.8;
    CHECK(oblique_jump_cost(lambda, nu, {0.0, 0.0, 0.0}, kAbs.psi) == doctest::Approx(std::abs(lambda.dot(nu))));
    CHECK(oblique_jump_cost(lambda, nu, {0.0, 0.0, 0.3}, surface_density("norm_jump")) > lambda.norm());
}

TEST_CASE("sandwich certificate") {
    std::mt19937_64 rng(37);
    for (int dim = 2; dim <= 3; ++dim) {
        const Mat A = oracle::random_matrix(rng, dim, dim), B = oracle::random_matrix(rng, dim, dim);
        const ExplReport r = verify_expl(A, B);
        for (const SandwichValues *v : {&r.abs, &r.plus, &r.minus}) {
            CHECK(v->mid_gap() >= -1e-12);
            CHECK(v->upper_gap() >= -1e-10);
            CHECK(v->upper <= v->mid + 1e-9);
        }
        CHECK(r.plus.lower - r.minus.lower == doctest::Approx((A - B).trace()));
    }
    ExplOptions strict;
    strict.tolerance = -1.0;
    CHECK_THROWS_AS(verify_expl(Mat::Identity(2, 2), Mat::Zero(2, 2), {}, strict), NumericalError);
}

TEST_CASE("invalid cell inputs") {
    OptimizerBudget b;
    b.restarts = 0;
    CHECK_THROWS_AS(b.validate(), InvalidArgument);
    b = {};
    b.n_schedule = {};
    CHECK_THROWS_AS(b.validate(), InvalidArgument);
    CHECK_THROWS_AS(estimate_H(Mat::Identity(2, 2), Mat::Identity(3, 3), kAbs), InvalidArgument);
    CHECK_THROWS_AS(estimate_h(Vec::Ones(2), Vec::Ones(2), kAbs.psi), InvalidArgument);
    CHECK_THROWS_AS(frame_oracle(Mat::Identity(2, 2), kAbs.psi, 0), InvalidArgument);
}

TEST_CASE("ties resolve to the smallest angles") {
    // Every frame has cost |tr| for a positive multiple of the identity.
    const Mat A = 2.0 * Mat::Identity(2, 2);
    const CellSolution s = estimate_H(A, Mat::Zero(2, 2), kAbs);
    CHECK(s.frame.angles[0] == 0.0);
    CHECK(s.value == doctest::Approx(4.0));
}
