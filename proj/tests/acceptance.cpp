// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include "oracles.hpp"
#include "sdrelax/cell.hpp"
#include "sdrelax/energy.hpp"
#include "sdrelax/experiments.hpp"
#include "sdrelax/optdesign.hpp"
#include "sdrelax/relaxed.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace sdrelax;

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string &name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw std::runtime_error("no column " + name);
    }
    double num(std::size_t row, const std::string &name) const { return std::stod(rows[row][column(name)]); }
    const std::string &str(std::size_t row, const std::string &name) const { return rows[row][column(name)]; }
    std::vector<double> nums(std::size_t row, const std::string &name) const {
        std::vector<double> out;
        std::istringstream in(str(row, name));
        for (double x; in >> x;) out.push_back(x);
        return out;
    }
};

// Plain CSV reader; quoted fields here never contain commas of interest.
std::vector<std::string> split_row(const std::string &line) {
    std::vector<std::string> out{""};
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') quoted = !quoted;
        else if (ch == ',' && !quoted) out.emplace_back();
        else out.back() += ch;
    }
    return out;
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

// Configs already run, kept for the determinism criterion.
std::vector<std::pair<Json, std::string>> g_runs;

Table run_table(const Json &cfg, int jobs = 1) {
    RunOptions opt;
    opt.jobs = jobs;
    const RunResult r = run(cfg, opt);
    if (r.exit_code != kExitOk) throw std::runtime_error("command failed: " + r.error);
    g_runs.emplace_back(cfg, r.csv);
    Table t;
    std::istringstream in(r.csv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (t.header.empty()) t.header = split_row(line);
        else t.rows.push_back(split_row(line));
    }
    return t;
}

std::string fmt(const char *f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

Outcome broken_ramp_criterion() {
    Outcome o;
    const Table t = run_table({{"command", "sequence"}, {"example", "broken-ramp"}, {"n", {1, 2, 4, 8, 16, 32}}});
    o.require(t.rows.size() == 6, "expected six rows");
    double worst = 0.0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const int n = static_cast<int>(t.num(i, "n"));
        worst = std::max({worst, std::abs(t.num(i, "l1_error") - oracle::broken_ramp_l1(n)),
                          std::abs(t.num(i, "singular_tv") - oracle::broken_ramp_jump_total(n)),
                          std::abs(t.num(i, "energy") - oracle::broken_ramp_jump_total(n))});
    }
    o.require(worst <= 1e-10, fmt("worst deviation %.3g", worst));
    // E(n) = 1 - 1/n, so 2 E(2n) - E(n) removes the 1/n term.
    const double limit = 2.0 * t.num(5, "energy") - t.num(4, "energy");
    const double exact = exact_H_abs(Mat::Constant(1, 1, 2.0), Mat::Constant(1, 1, 1.0)) * 1.0;
    o.require(std::abs(limit - exact) <= 1e-10, fmt("extrapolated limit %.17g, exact %.17g", limit, exact));
    if (o.pass) o.detail = fmt("max deviation %.2g, extrapolated limit %.15g", worst, limit);
    return o;
}

Outcome deck_of_cards_criterion() {
    Outcome o;
    const Table t = run_table({{"command", "sequence"}, {"example", "deck-of-cards"}, {"n", {1, 2, 4, 8, 16, 32}}});
    for (std::size_t i = 0; i < t.rows.size(); ++i) o.require(t.num(i, "energy") == 0.0, "nonzero interfacial energy");
    const StructuredDeformation sd = deck_of_cards_sd();
    Mat shear = Mat::Zero(3, 3);
    shear(0, 2) = 1.0;
    o.require(sd.disarrangement(0) == shear, "disarrangement is not e1 (x) e3");
    const double tr = tr_M_integral(sd);
    o.require(std::abs(tr) <= 1e-12, fmt("int tr M = %.3g", tr));
    if (o.pass) o.detail = "energy 0 for n = 1..32, M = e1 (x) e3, int tr M = " + fmt("%.3g", tr);
    return o;
}

// Sandwich rows are kept for the design criterion.
Table g_sandwich2, g_sandwich3;

Outcome sandwich_criterion() {
    Outcome o;
    g_sandwich2 = run_table({{"command", "verify-expl"}, {"dim", 2}, {"samples", 100}, {"seed", 7}}, 4);
    g_sandwich3 = run_table({{"command", "verify-expl"}, {"dim", 3}, {"samples", 25}, {"seed", 7}}, 4);
    double mid2 = 0.0, mid3 = 0.0, up2 = 0.0, up3 = 0.0;
    for (std::size_t i = 0; i < g_sandwich2.rows.size(); ++i) {
        mid2 = std::max(mid2, g_sandwich2.num(i, "abs_mid_gap"));
        up2 = std::max(up2, std::abs(g_sandwich2.num(i, "abs_upper") - g_sandwich2.num(i, "abs_mid")));
    }
    for (std::size_t i = 0; i < g_sandwich3.rows.size(); ++i) {
        mid3 = std::max(mid3, g_sandwich3.num(i, "abs_mid_gap"));
        up3 = std::max(up3, std::abs(g_sandwich3.num(i, "abs_upper") - g_sandwich3.num(i, "abs_mid")));
    }
    o.require(g_sandwich2.rows.size() == 100 && g_sandwich3.rows.size() == 25, "wrong case count");
    o.require(mid2 <= 1e-6, fmt("2D oracle gap %.3g", mid2));
    o.require(mid3 <= 5e-3, fmt("3D oracle gap %.3g", mid3));
    o.require(up2 <= 1e-5, fmt("2D optimizer vs oracle %.3g", up2));
    o.require(up3 <= 1e-3, fmt("3D optimizer vs oracle %.3g", up3));
    if (o.pass)
        o.detail = fmt("oracle gap 2D %.2g, ", mid2) + fmt("3D %.2g; ", mid3) + fmt("optimizer-oracle 2D %.2g, ", up2) +
                   fmt("3D %.2g", up3);
    return o;
}

Outcome convergence_criterion() {
    Outcome o;
    const Table t = run_table({{"command", "cell"},
                               {"dim", 2},
                               {"samples", 10},
                               {"seed", 7},
                               {"budget", {{"n_schedule", {4, 8, 16, 32}}}}});
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const std::vector<double> realized = t.nums(i, "realized");
        const double limit = t.num(i, "frame_cost");
        o.require(realized.size() == 4, "expected four refinements");
        for (std::size_t k = 1; k < realized.size(); ++k) {
            const double ratio = (realized[k - 1] - limit) / (realized[k] - limit);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    o.require(t.rows.size() == 10, "expected ten cases");
    o.require(lo >= 1.5 && hi <= 2.5, fmt("gap ratios in [%.3f, %.3f]", lo, hi));
    if (o.pass) o.detail = fmt("gap ratios under doubling in [%.3f, %.3f]", lo, hi);
    return o;
}

Outcome vpm_criterion() {
    Outcome o;
    double worst = 0.0, sum = 0.0;
    std::size_t cases = 0;
    for (int dim : {2, 3}) {
        const Table t = run_table({{"command", "vpm"},
                                   {"examples", dim == 2},
                                   {"random", 20},
                                   {"dim", dim},
                                   {"resolution", 4},
                                   {"seed", 7}});
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            // g has no jumps here, so the bulk form must hold on its own.
            worst = std::max({worst, t.num(i, "bulk_residual_plus"), t.num(i, "bulk_residual_minus")});
            sum = std::max(sum, t.num(i, "sum_residual"));
        }
        cases += t.rows.size();
    }
    o.require(cases == 42, "expected 42 cases");
    o.require(worst <= 1e-9, fmt("relative residual %.3g", worst));
    o.require(sum <= 1e-12, fmt("|V+ + V- - V| = %.3g", sum));
    if (o.pass) o.detail = fmt("relative residual %.2g, sum residual %.2g", worst, sum) + " over 42 cases";
    return o;
}

Outcome h_cell_criterion() {
    Outcome o;
    double worst = 0.0, improvement = 0.0;
    std::size_t cases = 0;
    for (int dim : {2, 3}) {
        const Table t = run_table({{"command", "h-cell"}, {"dim", dim}, {"samples", 50}, {"seed", 7}});
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const auto l = t.nums(i, "lambda"), n = t.nums(i, "nu");
            double dot = 0.0;
            for (int k = 0; k < dim; ++k) dot += l[k] * n[k];
            worst = std::max(worst, std::abs(t.num(i, "upper") - std::abs(dot)));
            improvement = std::max(improvement, t.num(i, "improvement"));
        }
        cases += t.rows.size();
    }
    // Sampled splits on top of the optimizer's own search.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const SurfaceDensity psi = surface_density("abs_normal_jump");
    double split_gain = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const int dim = 2 + k % 2;
        const Vec lambda = random_matrix(rng, dim, 1, 2.0);
        const Vec nu = random_unit(rng, dim);
        std::vector<double> f(2 + k % 3);
        double s = 0.0;
        for (auto &x : f) s += (x = u(rng));
        for (auto &x : f) x /= s;
        split_gain = std::max(split_gain, psi(lambda, nu) - parallel_jump_cost(lambda, nu, f, psi));
    }
    o.require(cases == 100, "expected 100 cases");
    o.require(worst <= 1e-9, fmt("|estimate - |l.n|| = %.3g", worst));
    o.require(improvement <= 1e-9 && split_gain <= 1e-9, fmt("split gain %.3g", std::max(improvement, split_gain)));
    if (o.pass) o.detail = fmt("max |estimate - |l.n|| %.2g, max split gain %.2g", worst, std::max(improvement, split_gain));
    return o;
}

Outcome validator_criterion() {
    Outcome o;
    const Table t = run_table({{"command", "validate-densities"},
                               {"densities",
                                {"abs_normal_jump", "positive_normal_jump", "negative_normal_jump", "squared_norm_jump",
                                 "phase_normal_jump"}},
                               {"samples", 10000},
                               {"seed", 7}});
    std::map<std::string, std::string> status;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        status[t.str(i, "density") + ":" + t.str(i, "hypothesis")] = t.str(i, "status");
    for (const char *d : {"abs_normal_jump", "positive_normal_jump", "negative_normal_jump"}) {
        const std::string s = d;
        o.require(status[s + ":H3"] == "pass" && status[s + ":H4"] == "pass", s + " fails H3/H4");
        o.require(status[s + ":H2-lower"] == "warn", s + " gives no H2 lower-bound warning");
    }
    o.require(status["squared_norm_jump:H3"] == "fail", "squared density passes H3");
    for (const char *h : {"H5", "H6", "H7", "H8"})
        o.require(status[std::string("phase_normal_jump:") + h] == "pass", std::string("interface density fails ") + h);
    if (o.pass) o.detail = "normal-jump densities pass H3/H4 with H2 warning, |l|^2 fails H3, interface density passes H5-H8";
    return o;
}

Outcome design_criterion() {
    Outcome o;
    std::mt19937_64 rng(7);
    Json cases = Json::array();
    for (int k = 0; k < 10; ++k) {
        const int dim = 1 + k % 3;
        const Vec c = random_matrix(rng, dim, 1), nu = random_unit(rng, dim);
        cases.push_back({{"kind", "h"}, {"a", k % 2}, {"b", k % 2}, {"c", to_json(c)}, {"d", to_json(c)}, {"nu", to_json(nu)}});
        cases.push_back({{"kind", "h"}, {"a", 1}, {"b", 0}, {"c", to_json(c)}, {"d", to_json(c)}, {"nu", to_json(nu)}});
    }
    const Json densities = {{"W0", "zero"}, {"W1", "zero"}, {"psi0", "abs_normal_jump"}, {"psi1", "abs_normal_jump"}};
    const Table h = run_table({{"command", "design"}, {"cases", cases}, {"densities", densities}});
    double trivial = 0.0, unit = 0.0;
    for (std::size_t i = 0; i < h.rows.size(); i += 2) {
        trivial = std::max(trivial, std::abs(h.num(i, "upper")));
        unit = std::max(unit, std::abs(h.num(i + 1, "upper") - 1.0));
    }
    o.require(trivial == 0.0, fmt("h(a,a,c,c,nu) = %.3g", trivial));
    o.require(unit <= 1e-9, fmt("|h(1,0,c,c,nu) - 1| = %.3g", unit));

    // Constant phase reduces to the plain energy.
    const DensitySet plain{bulk_density("power", 2.0), surface_density("norm_jump")};
    const DesignDensitySet same{plain.W, plain.W, plain.psi, plain.psi, pair_density("phase_normal_jump")};
    double reduction = 0.0;
    for (int k = 0; k < 20; ++k) {
        const StructuredDeformation sd = random_piecewise_sd(rng, 1 + k % 3, 3, 2);
        const PhaseField chi = PhaseField::constant(sd.g.mesh(), k % 2);
        reduction = std::max(reduction, std::abs(design_energy(chi, sd.g, same) - energy(sd.g, plain)));
    }
    o.require(reduction <= 1e-12, fmt("constant-phase reduction error %.3g", reduction));

    // Bulk phase densities against the sandwich rows.
    double bulk = 0.0;
    for (const Table *s : {&g_sandwich2, &g_sandwich3}) {
        Json bulk_cases = Json::array();
        for (std::size_t i = 0; i < s->rows.size(); ++i) {
            const int dim = static_cast<int>(s->num(i, "dim"));
            auto matrix = [&](const std::string &col) {
                const auto v = s->nums(i, col);
                Json m = Json::array();
                for (int r = 0; r < dim; ++r) m.push_back(std::vector<double>(v.begin() + r * dim, v.begin() + (r + 1) * dim));
                return m;
            };
            bulk_cases.push_back({{"kind", "H"}, {"phase", int(i % 2)}, {"A", matrix("A")}, {"B", matrix("B")}});
        }
        const Table H = run_table({{"command", "design"}, {"cases", bulk_cases}, {"densities", densities}}, 4);
        for (std::size_t i = 0; i < H.rows.size(); ++i)
            bulk = std::max(bulk, std::abs(H.num(i, "upper") - s->num(i, "abs_upper")));
    }
    o.require(bulk <= 1e-5, fmt("bulk design density vs sandwich %.3g", bulk));
    if (o.pass)
        o.detail = fmt("h trivial %.2g, |h(1,0,c,c)-1| %.2g, ", trivial, unit) +
                   fmt("reduction %.2g, bulk vs sandwich %.2g", reduction, bulk);
    return o;
}

Outcome determinism_criterion() {
    Outcome o;
    const auto runs = g_runs;
    for (const auto &[cfg, csv] : runs) {
        RunOptions opt;
        opt.jobs = 3;
        const RunResult again = run(cfg, opt);
        o.require(again.exit_code == kExitOk && data_rows(again.csv) == data_rows(csv),
                  "rows differ for " + cfg.value("command", std::string()));
    }
    if (o.pass) o.detail = std::to_string(runs.size()) + " commands re-run with identical data rows";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char *name;
        double budget_seconds;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "broken ramp sequence", 1.0, broken_ramp_criterion},
        {2, "deck of cards", 1.0, deck_of_cards_criterion},
        {3, "bulk sandwich", 60.0, sandwich_criterion},
        {4, "realized competitor convergence", 30.0, convergence_criterion},
        {5, "signed relaxed energy identity", 10.0, vpm_criterion},
        {6, "surface cell exactness", 5.0, h_cell_criterion},
        {7, "hypothesis validators", 5.0, validator_criterion},
        {8, "optimal design reductions", 30.0, design_criterion},
        {9, "determinism", INFINITY, determinism_criterion},
    };
    int failures = 0;
    for (const auto &c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.pass && secs > c.budget_seconds) {
            o.pass = false;
            o.detail += fmt(" (runtime %.2f s over %.0f s)", secs, c.budget_seconds);
        }
        std::printf("%s criterion %d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
