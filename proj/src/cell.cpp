#include "sdrelax/cell.hpp"

#include "sdrelax/energy.hpp"
#include "sdrelax/optimize.hpp"
#include "sdrelax/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace sdrelax {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTieTol = 1e-10;

double improvement_margin(double best) { return 1e-12 * (1.0 + std::abs(best)); }

std::vector<double> normalized_angles(std::vector<double> angles) {
    for (auto &a : angles) {
        a = std::fmod(a, 2.0 * kPi);
        if (a < 0.0) a += 2.0 * kPi;
        if (a >= 2.0 * kPi) a = 0.0;
    }
    return angles;
}

std::string describe(const std::vector<double> &xs) {
    std::ostringstream os;
    os.precision(10);
    os << '[';
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? " " : "") << xs[i];
    os << ']';
    return os.str();
}

NelderMeadOptions nm_options(const OptimizerBudget &b) {
    NelderMeadOptions o;
    o.max_iterations = b.max_iterations;
    o.simplex_tolerance = b.simplex_tolerance;
    return o;
}

void check_shapes(const Mat &A, const Mat &B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) throw InvalidArgument("A and B must have the same shape");
    require_dim(static_cast<int>(A.cols()));
    require_dim(static_cast<int>(A.rows()));
    if (!is_finite(A) || !is_finite(B)) throw InvalidArgument("A and B must be finite");
}

Vec cross3(const Vec &a, const Vec &b) {
    Vec c(3);
    c << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
    return c;
}

// Best frame over multi-start simplex runs, ties broken toward the
// lexicographically smallest normalized angles.
std::pair<Frame, double> best_frame(const Mat &M, const SurfaceDensity &psi, const OptimizerBudget &budget,
                                    double &min_value) {
    const int dim = static_cast<int>(M.cols());
    const int k = Frame::angle_count(dim);
    auto cost = [&](const std::vector<double> &angles) { return frame_cost(M, Frame(dim, angles), psi); };
    struct Candidate {
        double value;
        std::vector<double> angles;
    };
    std::vector<Candidate> found;
    for (const auto &start : start_points(k, budget.restarts, -kPi, kPi, budget.seed)) {
        const auto r = nelder_mead(cost, start, nm_options(budget));
        if (!std::isfinite(r.value))
            throw NumericalError("frame search produced a non-finite cost at angles " + describe(r.x));
        auto angles = normalized_angles(r.x);
        found.push_back({cost(angles), std::move(angles)});
    }
    min_value = std::min_element(found.begin(), found.end(), [](auto &a, auto &b) { return a.value < b.value; })->value;
    const Candidate *pick = nullptr;
    for (const auto &c : found) {
        if (c.value > min_value + kTieTol) continue;
        if (!pick || c.angles < pick->angles) pick = &c;
    }
    return {Frame(dim, pick->angles), pick->value};
}

}  // namespace

void OptimizerBudget::validate() const {
    if (restarts < 1 || max_iterations < 1 || !(simplex_tolerance > 0.0))
        throw InvalidArgument("optimizer budget entries must be positive");
    if (n_schedule.empty()) throw InvalidArgument("optimizer budget needs a non-empty n schedule");
    for (int n : n_schedule)
        if (n < 1) throw InvalidArgument("refinement indices must be positive");
}

CellSolution estimate_H(const Mat &A, const Mat &B, const DensitySet &ds, const OptimizerBudget &budget) {
    budget.validate();
    check_shapes(A, B);
    const int dim = static_cast<int>(A.cols());
    const Mat M = A - B;

    CellSolution sol;
    double surface = 0.0;
    if (M.isZero(0.0)) {
        sol.frame = Frame::identity(dim);
        sol.frame_value = frame_cost(M, sol.frame, ds.psi);
        surface = sol.frame_value;
    } else {
        auto [frame, value] = best_frame(M, ds.psi, budget, surface);
        sol.frame = frame;
        sol.frame_value = value;
    }

    double bulk = ds.W.is_zero() ? 0.0 : ds.W(B);
    if (!ds.W.is_zero()) {
        const int d = static_cast<int>(B.rows());
        for (int axis = 0; axis < dim; ++axis) {
            const Mat e = unit_vector(dim, axis).transpose();
            auto layered = [&](const std::vector<double> &x) {
                const Vec a = Eigen::Map<const Eigen::VectorXd>(x.data(), d);
                return 0.5 * ds.W(Mat(B + a * e)) + 0.5 * ds.W(Mat(B - a * e));
            };
            const double scale = 1.0 + B.norm();
            for (const auto &start : start_points(d, budget.restarts, -scale, scale, budget.seed + 1 + axis)) {
                const auto r = nelder_mead(layered, start, nm_options(budget));
                if (std::isfinite(r.value) && r.value < bulk - improvement_margin(bulk)) {
                    bulk = r.value;
                    sol.laminate = Laminate{axis, Vec(Eigen::Map<const Eigen::VectorXd>(r.x.data(), d))};
                }
            }
        }
    }
    const GridMesh cube = GridMesh::unit_cube(dim);
    sol.value = surface + bulk * cube.volume();
    if (!std::isfinite(sol.value)) throw NumericalError("cell value for H is not finite");

    double best_total = 0.0;
    for (int n : budget.n_schedule) {
        PiecewiseField u = staircase_sequence(A, B, sol.frame, n, cube, sol.laminate);
        RealizedEnergy r{n, 0.0, clamp_energy(u, ds.psi)};
        try {
            r.interior = energy(u, ds);
        } catch (const NumericalError &) {
            r.interior = std::nan("");
        }
        if (!std::isfinite(r.total()))
            throw NumericalError("non-finite energy for staircase competitor " + field_to_json(u).dump());
        sol.realized.push_back(r);
        if (!sol.competitor_field || r.total() < best_total) {
            best_total = r.total();
            sol.refinement_n = n;
            sol.competitor_field = std::move(u);
        }
    }
    std::ostringstream os;
    os << "staircase frame angles " << describe(sol.frame.angles) << " n " << sol.refinement_n;
    if (sol.laminate) os << " laminate axis " << sol.laminate->axis;
    sol.competitor = os.str();
    return sol;
}

int default_oracle_resolution(int dim) { return dim == 3 ? 60 : 720; }

namespace {

template <class Visit>
void visit_oracle_grid(int dim, int res, Visit &&visit) {
    if (dim == 1) {
        visit(std::vector<double>{});
        return;
    }
    if (res < 1) throw InvalidArgument("oracle grid needs at least one point per angle");
    if (dim == 2) {
        for (int k = 0; k < res; ++k) visit(std::vector<double>{k * (kPi / 2.0) / res});
        return;
    }
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j)
            for (int l = 0; l < res; ++l)
                visit(std::vector<double>{i * kPi / res, -kPi / 2.0 + j * kPi / res, l * kPi / res});
}

std::pair<double, std::vector<double>> oracle_search(const Mat &M, const SurfaceDensity &psi, int res) {
    const int dim = static_cast<int>(M.cols());
    require_dim(dim);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> arg;
    visit_oracle_grid(dim, res, [&](const std::vector<double> &angles) {
        const Mat R = frame_matrix(Frame(dim, angles));
        double c = 0.0;
        for (int i = 0; i < dim; ++i) {
            const Vec nu = R.col(i);
            c += psi(Vec(M * nu), nu);
        }
        if (c < best) {
            best = c;
            arg = angles;
        }
    });
    return {best, arg};
}

}  // namespace

double frame_oracle(const Mat &M, const SurfaceDensity &psi, int grid_resolution) {
    return oracle_search(M, psi, grid_resolution).first;
}

Frame frame_oracle_argmin(const Mat &M, const SurfaceDensity &psi, int grid_resolution) {
    return Frame(static_cast<int>(M.cols()), oracle_search(M, psi, grid_resolution).second);
}

double parallel_jump_cost(const Vec &lambda, const Vec &nu, const std::vector<double> &fractions,
                          const SurfaceDensity &psi) {
    double c = 0.0;
    for (double f : fractions) c += psi(Vec(f * lambda), nu);
    return c;
}

double oblique_jump_cost(const Vec &lambda, const Vec &nu, const std::vector<double> &apex, const SurfaceDensity &psi) {
    const int dim = static_cast<int>(nu.size());
    if (dim < 2 || static_cast<int>(apex.size()) != dim) throw InvalidArgument("oblique competitor needs a full apex");
    for (int i = 0; i + 1 < dim; ++i)
        if (!(std::abs(apex[i]) < 0.5)) throw InvalidArgument("oblique apex must project inside the midplane");
    if (!(std::abs(apex[dim - 1]) < 0.5)) throw InvalidArgument("oblique apex must lie inside the cube");
    const Mat R = rotation_with_last_column(nu);
    Vec p(dim);
    for (int i = 0; i < dim; ++i) p(i) = apex[i];
    double c = 0.0;
    if (dim == 2) {
        Vec left(2), right(2);
        left << -0.5, 0.0;
        right << 0.5, 0.0;
        for (const auto &[a, b] : {std::pair{left, p}, std::pair{p, right}}) {
            const Vec t = b - a;
            const double len = t.norm();
            Vec n(2);
            n << -t(1), t(0);
            c += psi(lambda, Vec(R * n / len)) * len;
        }
        return c;
    }
    std::vector<Vec> corners;
    for (auto [x, y] : {std::pair{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}) {
        Vec q(3);
        q << x, y, 0.0;
        corners.push_back(q);
    }
    for (int k = 0; k < 4; ++k) {
        Vec n = cross3(corners[k] - p, corners[(k + 1) % 4] - p);
        const double twice_area = n.norm();
        if (twice_area == 0.0) continue;
        if (n(2) < 0.0) n = -n;
        c += psi(lambda, Vec(R * n / twice_area)) * 0.5 * twice_area;
    }
    return c;
}

CellSolution estimate_h(const Vec &lambda, const Vec &nu, const SurfaceDensity &psi, const OptimizerBudget &budget) {
    budget.validate();
    if (lambda.size() != nu.size()) throw InvalidArgument("estimate_h: jump and normal dimensions differ");
    const int dim = static_cast<int>(nu.size());
    require_dim(dim);
    if (!is_finite(lambda) || std::abs(nu.norm() - 1.0) > kOrthoTol)
        throw InvalidArgument("estimate_h: needs a finite jump and a unit normal");

    CellSolution sol;
    sol.frame = Frame::identity(dim);
    sol.splits = {{1.0, 0.0}};
    sol.value = psi(lambda, nu);
    sol.competitor = "single midplane jump";
    if (!std::isfinite(sol.value)) throw NumericalError("estimate_h: density is not finite on the jump");
    if (lambda.isZero(0.0)) {
        sol.competitor = "constant field";
        sol.competitor_field = jump_competitor(lambda, nu, sol.splits);
        sol.frame_value = sol.value;
        return sol;
    }

    // Parallel jumps: k - 1 free fractions, the last one closes the sum.
    for (int k = 2; k <= 4; ++k) {
        auto fractions = [](const std::vector<double> &x) {
            std::vector<double> f(x);
            double rest = 1.0;
            for (double v : x) rest -= v;
            f.push_back(rest);
            return f;
        };
        auto cost = [&](const std::vector<double> &x) { return parallel_jump_cost(lambda, nu, fractions(x), psi); };
        auto starts = start_points(k - 1, budget.restarts, -1.0, 2.0, budget.seed + 17 * k);
        starts.front().assign(k - 1, 1.0 / k);
        for (const auto &start : starts) {
            const auto r = nelder_mead(cost, start, nm_options(budget));
            if (std::isfinite(r.value) && r.value < sol.value - improvement_margin(sol.value)) {
                sol.value = r.value;
                const auto f = fractions(r.x);
                sol.splits.clear();
                for (int i = 0; i < k; ++i) sol.splits.push_back({f[i], -0.5 + (i + 1.0) / (k + 1.0)});
                sol.competitor = std::to_string(k) + " parallel jumps, fractions " + describe(f);
            }
        }
    }

    // Oblique graph surfaces through an apex; tanh keeps the apex inside.
    if (dim >= 2) {
        auto apex_of = [](const std::vector<double> &z) {
            std::vector<double> a(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) a[i] = 0.5 * (1.0 - 1e-9) * std::tanh(z[i]);
            return a;
        };
        auto cost = [&](const std::vector<double> &z) { return oblique_jump_cost(lambda, nu, apex_of(z), psi); };
        for (const auto &start : start_points(dim, budget.restarts, -2.0, 2.0, budget.seed + 101)) {
            const auto r = nelder_mead(cost, start, nm_options(budget));
            if (std::isfinite(r.value) && r.value < sol.value - improvement_margin(sol.value)) {
                sol.value = r.value;
                sol.splits.clear();
                sol.apex = apex_of(r.x);
                sol.competitor = std::string(dim == 2 ? "tent" : "pyramid") + " with apex " + describe(sol.apex);
            }
        }
    }
    if (sol.apex.empty()) sol.competitor_field = jump_competitor(lambda, nu, sol.splits);
    sol.frame_value = sol.value;
    return sol;
}

ExplReport verify_expl(const Mat &A, const Mat &B, const OptimizerBudget &budget, const ExplOptions &opt) {
    check_shapes(A, B);
    if (A.rows() != A.cols()) throw InvalidArgument("verify_expl: A and B must be square");
    const int dim = static_cast<int>(A.cols());
    const int res = opt.oracle_resolution > 0 ? opt.oracle_resolution : default_oracle_resolution(dim);
    const Mat M = A - B;
    const BulkDensity zero = bulk_density("zero");

    auto sandwich = [&](const char *name, double lower, const SurfaceDensity &psi, ExplReport *rep) {
        SandwichValues v;
        v.lower = lower;
        v.mid = frame_oracle(M, psi, res);
        const CellSolution sol = estimate_H(A, B, DensitySet{zero, psi}, budget);
        v.upper = sol.value;
        if (rep) {
            rep->frame = sol.frame;
            rep->refinement_n = sol.refinement_n;
        }
        if (v.lower > v.mid + opt.tolerance || v.lower > v.upper + opt.tolerance) {
            std::ostringstream os;
            os.precision(17);
            os << "sandwich violated for " << name << ": lower " << v.lower << " mid " << v.mid << " upper " << v.upper;
            throw NumericalError(os.str());
        }
        return v;
    };

    ExplReport rep;
    rep.abs = sandwich("abs", exact_H_abs(A, B), surface_density("abs_normal_jump"), &rep);
    if (opt.signed_variants) {
        rep.plus = sandwich("plus", exact_H_plus(A, B), surface_density("positive_normal_jump"), nullptr);
        rep.minus = sandwich("minus", exact_H_minus(A, B), surface_density("negative_normal_jump"), nullptr);
    }
    return rep;
}

}  // namespace sdrelax
