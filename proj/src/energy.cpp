#include "sdrelax/energy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace sdrelax {

namespace {

double normal_component(const Vec &lambda, const Vec &nu) {
    if (lambda.size() != nu.size()) throw InvalidArgument("surface density: jump and normal dimensions differ");
    return lambda.dot(nu);
}

std::string fmt(const Mat &m) {
    std::ostringstream os;
    os.precision(6);
    os << '[';
    for (int i = 0; i < m.rows(); ++i) {
        if (i) os << ';';
        for (int j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    }
    os << ']';
    return os.str();
}

std::string fmt(const Vec &v) { return fmt(Mat(v.transpose())); }

class Sampler {
public:
    explicit Sampler(const SamplingOptions &opt) : opt_(opt), rng_(opt.seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    int bit() { return std::uniform_int_distribution<int>(0, 1)(rng_); }

    // Entries uniform in [-r t, r t] with t uniform in [0, 1], so that small
    // and large arguments are both visited.
    Mat matrix(int rows, int cols) {
        const double r = opt_.radius * uniform(0.0, 1.0);
        Mat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = uniform(-r, r);
        return m;
    }
    Vec vector(int n) { return matrix(n, 1); }

    Vec unit(int n) {
        std::normal_distribution<double> g;
        Vec v(n);
        do {
            for (int i = 0; i < n; ++i) v(i) = g(rng_);
        } while (v.norm() < 1e-8);
        return v / v.norm();
    }

private:
    SamplingOptions opt_;
    std::mt19937_64 rng_;
};

// Keeps the worst violation seen for one hypothesis.
struct Tracker {
    CheckResult result;
    CheckStatus on_violation;

    Tracker(std::string name, CheckStatus severity) : on_violation(severity) { result.hypothesis = std::move(name); }

    void record(double violation, bool violated, const std::string &witness) {
        if (violation > result.worst) {
            result.worst = violation;
            result.witness = witness;
        }
        if (violated) result.status = on_violation;
    }
};

void require_samples(const SamplingOptions &opt) {
    if (opt.samples < 1) throw InvalidArgument("hypothesis check needs at least one sample");
    require_dim(opt.dim);
}

}  // namespace

BulkDensity quadratic_about(const Mat &C) {
    const double lip = std::max(1.0, 2.0 * C.norm());
    return {"quadratic_about", [C](const Mat &A) { return (A - C).squaredNorm(); }, 2.0, lip};
}

BulkDensity bulk_density(const std::string &name, double exponent) {
    if (name == "zero") return {"zero", [](const Mat &) { return 0.0; }, 2.0, 0.0};
    if (name == "power") {
        if (!(exponent > 1.0)) throw InvalidArgument("power density needs an exponent p > 1");
        return {"power", [exponent](const Mat &A) { return std::pow(A.norm(), exponent); }, exponent, exponent};
    }
    if (name == "quadratic_identity") {
        return {"quadratic_identity",
                [](const Mat &A) {
                    if (A.rows() != A.cols()) throw InvalidArgument("quadratic_identity needs square gradients");
                    return (A - Mat::Identity(A.rows(), A.cols())).squaredNorm();
                },
                2.0, 2.0 * std::sqrt(3.0)};
    }
    throw InvalidArgument("unknown bulk density '" + name + "'");
}

SurfaceDensity surface_density(const std::string &name) {
    if (name == "abs_normal_jump")
        return {name, [](const Vec &l, const Vec &n) { return std::abs(normal_component(l, n)); }, 0.0, 1.0};
    if (name == "positive_normal_jump")
        return {name, [](const Vec &l, const Vec &n) { return positive_part(normal_component(l, n)); }, 0.0, 1.0};
    if (name == "negative_normal_jump")
        return {name, [](const Vec &l, const Vec &n) { return negative_part(normal_component(l, n)); }, 0.0, 1.0};
    if (name == "norm_jump") return {name, [](const Vec &l, const Vec &) { return l.norm(); }, 1.0, 1.0};
    if (name == "squared_norm_jump") return {name, [](const Vec &l, const Vec &) { return l.squaredNorm(); }, 1.0, 1.0};
    throw InvalidArgument("unknown surface density '" + name + "'");
}

InterfacePairDensity pair_density(const std::string &name) {
    if (name == "zero") return {name, [](int, int, const Vec &, const Vec &, const Vec &) { return 0.0; }, 0.0};
    if (name == "phase_normal_jump")
        return {name,
                [](int a, int b, const Vec &c, const Vec &d, const Vec &nu) {
                    return std::abs(a - b) * std::abs(normal_component(Vec(c - d), nu));
                },
                1.0};
    if (name == "signed_normal_jump")
        return {name, [](int, int, const Vec &c, const Vec &d, const Vec &nu) { return normal_component(Vec(c - d), nu); },
                1.0};
    throw InvalidArgument("unknown interface density '" + name + "'");
}

std::vector<std::string> bulk_density_names() { return {"zero", "power", "quadratic_identity"}; }

std::vector<std::string> surface_density_names() {
    return {"abs_normal_jump", "positive_normal_jump", "negative_normal_jump", "norm_jump", "squared_norm_jump"};
}

std::vector<std::string> pair_density_names() { return {"zero", "phase_normal_jump", "signed_normal_jump"}; }

double energy(const PiecewiseField &u, const DensitySet &ds) {
    const double cell_volume = u.mesh().volume() / u.mesh().cell_count();
    double bulk = 0.0;
    if (!ds.W.is_zero())
        for (const auto &c : u.cells()) bulk += ds.W(c.gradient) * cell_volume;
    const double total = bulk + jump_measure(u, ds.psi);
    if (!std::isfinite(total)) throw NumericalError("energy is not finite");
    return total;
}

const char *to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::warn: return "warn";
    default: return "fail";
    }
}

bool HypothesisReport::passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.status == CheckStatus::fail; });
}

const CheckResult &HypothesisReport::get(const std::string &hypothesis) const {
    for (const auto &c : checks)
        if (c.hypothesis == hypothesis) return c;
    throw InvalidArgument("report has no check named " + hypothesis);
}

HypothesisReport check_H1(const BulkDensity &W, const SamplingOptions &opt) {
    require_samples(opt);
    Sampler s(opt);
    Tracker h1("H1", CheckStatus::fail);
    const double p = W.growth_p;
    for (int k = 0; k < opt.samples; ++k) {
        const Mat A = s.matrix(opt.dim, opt.dim), B = s.matrix(opt.dim, opt.dim);
        const double dist = (A - B).norm();
        if (dist == 0.0) continue;
        const double denom = dist * (1.0 + std::pow(A.norm(), p - 1.0) + std::pow(B.norm(), p - 1.0));
        const double ratio = std::abs(W(A) - W(B)) / denom;
        const bool bad = !(ratio <= W.lipschitz_C * (1.0 + opt.rel_tol));
        if (ratio > h1.result.worst || bad) h1.record(ratio, bad, "A=" + fmt(A) + " B=" + fmt(B));
    }
    return {W.name, {h1.result}};
}

HypothesisReport check_H2_H3_H4(const SurfaceDensity &psi, const SamplingOptions &opt) {
    require_samples(opt);
    Sampler s(opt);
    const double tol = opt.rel_tol;
    Tracker lower("H2-lower", CheckStatus::warn), upper("H2-upper", CheckStatus::fail);
    Tracker h3("H3", CheckStatus::fail), h4("H4", CheckStatus::fail);
    for (int k = 0; k < opt.samples; ++k) {
        const Vec nu = s.unit(opt.dim);
        Vec lambda = s.vector(opt.dim);
        // Every fourth sample probes jumps tangent to the interface.
        if (k % 4 == 3 && opt.dim > 1) lambda -= lambda.dot(nu) * nu;
        const double mag = lambda.norm();
        const double val = psi(lambda, nu);
        const std::string w = "lambda=" + fmt(lambda) + " nu=" + fmt(nu);

        // No c1 > 0 exists once Psi vanishes on a nonzero jump.
        const double low_gap = psi.c1 * mag - val;
        const bool vanishes = mag > 0.0 && val <= tol * mag;
        lower.record(std::max({0.0, low_gap, vanishes ? mag : 0.0}), vanishes || low_gap > tol * (mag + std::abs(val)), w);
        const double up_gap = val - psi.C1 * mag;
        upper.record(std::max(0.0, up_gap), up_gap > tol * (mag + std::abs(val)) || !std::isfinite(val), w);

        const double t = s.uniform(0.0, opt.radius);
        const double scaled = psi(Vec(t * lambda), nu);
        const double hom = std::abs(scaled - t * val);
        h3.record(hom, hom > tol * (std::abs(scaled) + t * std::abs(val) + t * mag), w + " t=" + std::to_string(t));

        const Vec other = s.vector(opt.dim);
        const double sub = psi(Vec(lambda + other), nu) - val - psi(other, nu);
        h4.record(std::max(0.0, sub), sub > tol * (mag + other.norm() + std::abs(val)),
                  w + " lambda2=" + fmt(other));
    }
    return {psi.name, {lower.result, upper.result, h3.result, h4.result}};
}

HypothesisReport check_H5_to_H8(const InterfacePairDensity &psi2, const SamplingOptions &opt) {
    require_samples(opt);
    Sampler s(opt);
    const double tol = opt.rel_tol, C = psi2.bound_C;
    Tracker h5("H5", CheckStatus::fail), h6("H6", CheckStatus::fail), h7("H7", CheckStatus::fail),
        h8("H8", CheckStatus::fail);
    for (int k = 0; k < opt.samples; ++k) {
        const int a = s.bit(), b = s.bit();
        const Vec c = s.vector(opt.dim), d = s.vector(opt.dim), nu = s.unit(opt.dim);
        const double val = psi2(a, b, c, d, nu);
        const double scale = 1.0 + std::abs(a - b) + (c - d).norm();
        const std::string w = "a=" + std::to_string(a) + " b=" + std::to_string(b) + " c=" + fmt(c) + " d=" + fmt(d) +
                              " nu=" + fmt(nu);

        const double neg = -val, over = val - C * scale;
        h5.record(std::max({0.0, neg, over}), neg > tol * scale || over > tol * scale || !std::isfinite(val), w);

        const double swapped = psi2(b, a, d, c, Vec(-nu));
        const double asym = std::abs(val - swapped);
        h6.record(asym, asym > tol * (std::abs(val) + std::abs(swapped) + scale), w);

        const Vec c2 = s.vector(opt.dim), d2 = s.vector(opt.dim);
        const double diff = std::abs(val - psi2(a, b, c2, d2, nu));
        const double bound = C * ((c - d) - (c2 - d2)).norm();
        h7.record(std::max(0.0, diff - bound), diff - bound > tol * (scale + (c2 - d2).norm()), w + " c2=" + fmt(c2) + " d2=" + fmt(d2));

        // Diagonals are checked exactly.
        const double on_cc = psi2(a, b, c, c, nu), on_aa = psi2(a, a, c, d, nu);
        h8.record(std::max(std::abs(on_cc), std::abs(on_aa)), on_cc != 0.0 || on_aa != 0.0, w);
    }
    return {psi2.name, {h5.result, h6.result, h7.result, h8.result}};
}

}  // namespace sdrelax
