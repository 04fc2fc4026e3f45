#include <doctest.h>

#include "oracles.hpp"
#include "sdrelax/energy.hpp"
#include "sdrelax/experiments.hpp"
#include "sdrelax/fields.hpp"
#include "sdrelax/serialization.hpp"

#include <cmath>
#include <random>

using namespace sdrelax;

namespace {

std::vector<double> random_angles(std::mt19937_64 &rng, int dim) {
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    std::vector<double> a(Frame::angle_count(dim));
    for (auto &x : a) x = u(rng);
    return a;
}

double sampled_l1(const PiecewiseField &u, const PiecewiseField &v, int parts) {
    const auto &box = u.mesh().box();
    return oracle::box_integral(
        [&](const oracle::Vector &y) {
            const Vec x = u.mesh().to_physical(Vec(y));
            return (u.evaluate(x) - v.evaluate(x)).norm();
        },
        box.lo, box.hi, parts);
}

}  // namespace

TEST_CASE("mesh indexing and location") {
    const GridMesh m = GridMesh::unit_cube(2, 4);
    CHECK(m.cell_count() == 16);
    CHECK(m.volume() == doctest::Approx(1.0));
    for (int i = 0; i < m.cell_count(); ++i) CHECK(m.cell_index(m.cell_coords(i)) == i);
    Vec x(2);
    x << -0.5, 0.0;
    CHECK(m.cell_coords(m.locate(x)) == std::vector<int>{0, 2});
    x << 0.5, 0.5;
    CHECK(m.locate(x) == 15);
    CHECK(m.grid_lines(0).size() == 3);

    const GridMesh aniso(geometry::Box{Vec::Constant(3, -0.5), Vec::Constant(3, 0.5)}, std::vector<int>{2, 1, 3});
    CHECK(aniso.cell_count() == 6);
    CHECK_FALSE(aniso.is_uniform());

    std::mt19937_64 rng(1);
    const Vec nu = oracle::random_unit(rng, 3);
    const GridMesh r = GridMesh::rotated_cube(nu, 2);
    const Vec y = Vec::Constant(3, 0.2);
    CHECK((r.to_local(r.to_physical(y)) - y).norm() < 1e-14);
    CHECK(r.to_physical(unit_vector(3, 2)).dot(nu) == doctest::Approx(1.0));
}

TEST_CASE("broken ramp sequence matches the closed forms") {
    const SurfaceDensity norm = surface_density("norm_jump");
    const auto target = broken_ramp_sd().g;
    for (int n : {1, 2, 4, 8, 16, 32}) {
        const PiecewiseField u = broken_ramp(n);
        CHECK(std::abs(l1_distance(u, target) - oracle::broken_ramp_l1(n)) <= 1e-12);
        CHECK(std::abs(singular_total_variation(u) - oracle::broken_ramp_jump_total(n)) <= 1e-12);
        CHECK(std::abs(jump_measure(u, norm) - oracle::broken_ramp_jump_total(n)) <= 1e-12);
        // The clamp at x = 1 carries the last missing step of height 1/n.
        CHECK(std::abs(clamp_energy(u, norm) - 1.0 / n) <= 1e-12);
        CHECK(static_cast<int>(u.facets().size()) == n - 1);
    }
}

TEST_CASE("deck of cards has only tangential jumps") {
    const SurfaceDensity abs_psi = surface_density("abs_normal_jump");
    const auto target = deck_of_cards_sd().g;
    for (int n : {1, 2, 4, 8}) {
        const PiecewiseField u = deck_of_cards(n);
        CHECK(jump_measure(u, abs_psi) == 0.0);
        CHECK(std::abs(singular_total_variation(u) - double(n - 1) / n) <= 1e-12);
        CHECK(std::abs(l1_distance(u, target) - 1.0 / (2 * n)) <= 1e-12);
    }
}

TEST_CASE("integration by parts for staircases with a clamped boundary") {
    std::mt19937_64 rng(2);
    for (int dim = 1; dim <= 3; ++dim)
        for (int k = 0; k < 6; ++k) {
            const Mat A = oracle::random_matrix(rng, dim, dim), B = oracle::random_matrix(rng, dim, dim);
            const Frame f(dim, random_angles(rng, dim));
            const int n = 1 + k;
            const PiecewiseField u = staircase_sequence(A, B, f, n);
            const Mat total = total_derivative(u) + clamp_tensor(u);
            CHECK((total - A * u.mesh().volume()).cwiseAbs().maxCoeff() <= 1e-9);
            CHECK((average_gradient(u) - B).norm() <= 1e-14);
        }
}

TEST_CASE("staircase jump energy approaches the frame cost at rate 1/n") {
    std::mt19937_64 rng(3);
    const SurfaceDensity abs_psi = surface_density("abs_normal_jump");
    for (int dim = 2; dim <= 3; ++dim)
        for (int k = 0; k < 4; ++k) {
            const Mat A = oracle::random_matrix(rng, dim, dim), B = oracle::random_matrix(rng, dim, dim);
            const Frame f(dim, random_angles(rng, dim));
            const double limit = frame_cost(A - B, f, abs_psi);
            const PiecewiseField target = PiecewiseField::affine(GridMesh::unit_cube(dim), A);
            double prev_l1 = INFINITY;
            for (int n : {2, 4, 8, 16}) {
                const PiecewiseField u = staircase_sequence(A, B, f, n);
                const double err = std::abs(jump_measure(u, abs_psi) - limit);
                CHECK(err * n <= 3.0 * dim * (A - B).norm());
                const double l1 = l1_distance(u, target);
                CHECK(l1 <= prev_l1);
                CHECK(l1 * n <= 3.0 * dim * (A - B).norm());
                prev_l1 = l1;
            }
        }
}

TEST_CASE("exact L1 distance agrees with sampled quadrature") {
    std::mt19937_64 rng(4);
    const Mat A = oracle::random_matrix(rng, 2, 2), B = oracle::random_matrix(rng, 2, 2);
    const Frame f(2, {0.4});
    const PiecewiseField u = staircase_sequence(A, B, f, 3);
    const PiecewiseField g = PiecewiseField::affine(GridMesh::unit_cube(2), A);
    CHECK(l1_distance(u, g) == doctest::Approx(sampled_l1(u, g, 128)).epsilon(2e-3));
}

TEST_CASE("jump competitor carries the boundary datum on the faces normal to nu") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> side(-0.5, 0.5);
    for (int dim = 1; dim <= 3; ++dim)
        for (int k = 0; k < 10; ++k) {
            const Vec lambda = oracle::random_matrix(rng, dim, 1, 2.0);
            const Vec nu = oracle::random_unit(rng, dim);
            std::uniform_real_distribution<double> frac(0.1, 1.0), off(-0.45, 0.45);
            std::vector<JumpSplit> splits;
            double left = 1.0;
            for (int j = 0; j < 2; ++j) {
                const double fr = left * frac(rng);
                splits.push_back({fr, off(rng)});
                left -= fr;
            }
            splits.push_back({left, off(rng)});
            const PiecewiseField u = jump_competitor(lambda, nu, splits);
            const GridMesh &m = u.mesh();
            for (int s = 0; s < 20; ++s) {
                Vec y(dim);
                for (int i = 0; i < dim - 1; ++i) y(i) = side(rng);
                for (double face : {-0.5, 0.5}) {
                    y(dim - 1) = face;
                    const Vec x = m.to_physical(y);
                    CHECK((u.evaluate(x) - jump_boundary_datum(lambda, nu, x)).norm() <= 1e-12);
                }
            }
        }
}

TEST_CASE("coplanar facets merge and opposite orientations are rejected") {
    const GridMesh m = GridMesh::unit_cube(2, 2);
    const Vec e0 = unit_vector(2, 0);
    const Vec jump = Vec::Constant(1, 1.0);
    const PiecewiseField u(m, std::vector<Affine>(4, Affine::constant(Vec::Zero(1), 2)),
                           {PiecewiseField::plane_facet(m, e0, 0.1, jump), PiecewiseField::plane_facet(m, e0, 0.1, jump)});
    REQUIRE(u.facets().size() == 1);
    CHECK(u.facets()[0].jump(0) == 2.0);
    CHECK(u.facets()[0].area() == doctest::Approx(1.0));
    CHECK_THROWS_AS(PiecewiseField(m, std::vector<Affine>(4, Affine::constant(Vec::Zero(1), 2)),
                                   {PiecewiseField::plane_facet(m, e0, 0.1, jump),
                                    PiecewiseField::plane_facet(m, -e0, -0.1, jump)}),
                    InvalidArgument);
}

TEST_CASE("invalid fields are rejected") {
    const GridMesh m = GridMesh::unit_cube(1, 2);
    CHECK_THROWS_AS(GridMesh::unit_cube(2, 0), InvalidArgument);
    CHECK_THROWS_AS(GridMesh(geometry::Box{Vec::Constant(2, -0.5), Vec::Constant(2, 0.5)}, 2, Mat::Constant(2, 2, 1.0)), InvalidArgument);
    std::vector<Affine> broken{Affine::constant(Vec::Zero(1), 1), Affine::constant(Vec::Ones(1), 1)};
    CHECK_THROWS_AS(PiecewiseField(m, broken), InvalidArgument);
    CHECK_THROWS_AS(PiecewiseField(m, {Affine::constant(Vec::Zero(1), 1)}), InvalidArgument);
    CHECK_THROWS_AS(PiecewiseField::plane_facet(m, Vec::Constant(1, 2.0), 0.0, Vec::Ones(1)), InvalidArgument);
    CHECK_THROWS_AS(PiecewiseField::plane_facet(m, Vec::Ones(1), 0.7, Vec::Ones(1)), InvalidArgument);
    CHECK_THROWS_AS(staircase_sequence(Mat::Identity(2, 2), Mat::Identity(2, 2), Frame::identity(2), 0),
                    InvalidArgument);
    CHECK_THROWS_AS(jump_competitor(Vec::Ones(2), unit_vector(2, 1), {{0.5, 0.0}}), InvalidArgument);
    CHECK_THROWS_AS(sequence_report(StructuredDeformation(jump_competitor(Vec::Ones(2), unit_vector(2, 1), {{1.0, 0.0}}),
                                                          {Mat::Zero(2, 2)}),
                                    Frame::identity(2), {1}, {bulk_density("zero"), surface_density("norm_jump")}),
                    InvalidArgument);
}

TEST_CASE("serialization round trip preserves fields") {
    std::mt19937_64 rng(6);
    for (int dim = 1; dim <= 3; ++dim) {
        const StructuredDeformation sd = random_piecewise_sd(rng, dim, 2, 2);
        const Json j = sd_to_json(sd);
        const StructuredDeformation back = sd_from_json(Json::parse(j.dump()));
        CHECK(sd_to_json(back) == j);
        CHECK(l1_distance(sd.g, back.g) <= 1e-14);
        CHECK(back.G.size() == sd.G.size());
    }
    const PiecewiseField rotated = jump_competitor(Vec::Ones(2), oracle::random_unit(rng, 2), {{1.0, 0.1}});
    const Json j = field_to_json(rotated);
    CHECK(j.at("version") == kFieldFormatVersion);
    CHECK(field_to_json(field_from_json(j)) == j);
    CHECK_THROWS_AS(field_from_json(Json::parse(R"({"dim": 2})")), InvalidArgument);
}

TEST_CASE("refinement and restriction keep the field") {
    std::mt19937_64 rng(7);
    const StructuredDeformation sd = random_piecewise_sd(rng, 2, 2, 1);
    const PiecewiseField fine = refine(sd.g, 2);
    CHECK(fine.mesh().cell_count() == 16);
    CHECK(l1_distance(fine, sd.g) <= 1e-14);
    const PiecewiseField lo = restrict_to_half(fine, 1, 1, false), hi = restrict_to_half(fine, 1, 1, true);
    CHECK(lo.mesh().volume() + hi.mesh().volume() == doctest::Approx(1.0));
    Vec x(2);
    x << 0.1, 0.3;
    CHECK((hi.evaluate(x) - sd.g.evaluate(x)).norm() <= 1e-13);
}

TEST_CASE("determinant constraint on deck of cards") {
    const DpoReport r = validate_DPO(deck_of_cards_sd(2), 0.5);
    CHECK(r.all_pass);
    CHECK(r.cells.size() == 8);
    const DpoReport bad = validate_DPO(deck_of_cards_sd(), 2.0);
    CHECK_FALSE(bad.all_pass);
    CHECK(bad.failing_cells() == std::vector<int>{0});
}

TEST_CASE("pointwise values of the worked approximants") {
    // x + k/n on [k/n, (k+1)/n); at x = 0.25 with n = 2, k = 0.
    CHECK(broken_ramp(2).evaluate(Vec::Constant(1, 0.25))(0) == doctest::Approx(0.25));
    CHECK(broken_ramp(2).evaluate(Vec::Constant(1, 0.75))(0) == doctest::Approx(1.25));
    Vec x(3), expected(3);
    x << 0.1, 0.1, 0.6;
    expected << 0.6, 0.1, 0.6;
    CHECK((deck_of_cards(2).evaluate(x) - expected).norm() < 1e-15);
    Mat A(2, 2);
    A << 1.0, 2.0, 3.0, 4.0;
    const Vec y = Vec::Constant(2, 0.3);
    CHECK((PiecewiseField::affine(GridMesh::unit_cube(2, 3), A).evaluate(y) - A * y).norm() < 1e-15);
    CHECK_THROWS_AS(broken_ramp(2).evaluate(Vec::Constant(1, 1.5)), InvalidArgument);
}
