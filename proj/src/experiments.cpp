#include "sdrelax/experiments.hpp"

#include "sdrelax/cell.hpp"
#include "sdrelax/energy.hpp"
#include "sdrelax/optdesign.hpp"
#include "sdrelax/relaxed.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

namespace sdrelax {

// ----------------------------------------------------------------- helpers

Mat random_matrix(std::mt19937_64 &rng, int rows, int cols, double radius) {
    std::uniform_real_distribution<double> u(-radius, radius);
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

Vec random_unit(std::mt19937_64 &rng, int dim) {
    std::normal_distribution<double> g;
    Vec v(dim);
    do {
        for (int i = 0; i < dim; ++i) v(i) = g(rng);
    } while (v.norm() < 1e-6);
    return v / v.norm();
}

StructuredDeformation random_piecewise_sd(std::mt19937_64 &rng, int dim, int resolution, int jumps) {
    const GridMesh mesh = GridMesh::unit_cube(dim, resolution);
    const Mat A = random_matrix(rng, dim, dim);
    const Vec b = random_matrix(rng, dim, 1);
    const double h = 1.0 / resolution;
    // profile[j][k]: value of the axis-j profile at node k.
    std::vector<std::vector<Vec>> profile(dim);
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k <= resolution; ++k) profile[j].push_back(random_matrix(rng, dim, 1, 0.5));
    std::vector<Affine> cells;
    std::vector<Mat> G;
    for (int idx = 0; idx < mesh.cell_count(); ++idx) {
        const auto c = mesh.cell_coords(idx);
        Mat grad = A;
        Vec offset = b;
        for (int j = 0; j < dim; ++j) {
            const double t0 = -0.5 + c[j] * h;
            const Vec slope = (profile[j][c[j] + 1] - profile[j][c[j]]) / h;
            grad.col(j) += slope;
            offset += profile[j][c[j]] - slope * t0;
        }
        cells.push_back({grad, offset});
        G.push_back(random_matrix(rng, dim, dim));
    }
    std::vector<JumpFacet> facets;
    std::uniform_real_distribution<double> off(-0.3, 0.3);
    for (int k = 0; k < jumps; ++k) {
        const Vec nu = random_unit(rng, dim);
        const double c = off(rng);
        facets.push_back(PiecewiseField::plane_facet(mesh, nu, c, random_matrix(rng, dim, 1)));
    }
    return StructuredDeformation(PiecewiseField(mesh, std::move(cells), std::move(facets)), std::move(G));
}

std::vector<std::string> command_names() {
    return {"sequence", "cell", "h-cell", "verify-expl", "vpm", "design", "validate-densities"};
}

std::vector<std::string> data_rows(const std::string &csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        rows.push_back(line);
    }
    return rows;
}

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string flat(const Mat &m) {
    std::string s;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) s += (s.empty() ? "" : " ") + num(m(i, j));
    return s;
}

std::string flat(const std::vector<double> &xs) {
    std::string s;
    for (double x : xs) s += (s.empty() ? "" : " ") + num(x);
    return s;
}

std::string quoted(const std::string &s) {
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

// CSV table with one comment line per column describing the quantity.
class Table {
public:
    Table(std::string title, std::vector<std::pair<std::string, std::string>> columns)
        : title_(std::move(title)), columns_(std::move(columns)) {}

    void add(std::vector<std::string> row) {
        if (row.size() != columns_.size()) throw Error("internal: row width does not match table");
        rows_.push_back(std::move(row));
    }

    std::string str() const {
        std::ostringstream os;
        os << "# " << title_ << '\n';
        for (const auto &[name, meaning] : columns_) os << "# " << name << ": " << meaning << '\n';
        for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i].first;
        os << '\n';
        for (const auto &r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        }
        return os.str();
    }

private:
    std::string title_;
    std::vector<std::pair<std::string, std::string>> columns_;
    std::vector<std::vector<std::string>> rows_;
};

// Runs fn(i) for i in [0, count) on up to `jobs` threads; rethrows the
// exception of the lowest failing index.
void parallel_for(int count, int jobs, const std::function<void(int)> &fn) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int threads = std::clamp(jobs, 1, std::max(1, count));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto &t : pool) t.join();
    for (auto &e : errors)
        if (e) std::rethrow_exception(e);
}

struct Context {
    const Json &cfg;
    std::uint64_t seed;
    int jobs;
    bool seeded;  // seed given in the config or on the command line

    void require_seed(const std::string &what) const {
        if (!seeded) throw InvalidArgument(what + " draws random inputs and needs a seed");
    }
};

template <class T>
T get_or(const Json &j, const char *key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception &e) {
        throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
    }
}

int positive(const Json &j, const char *key, int fallback) {
    const int v = get_or<int>(j, key, fallback);
    if (v < 1) throw InvalidArgument(std::string("config field '") + key + "' must be positive");
    return v;
}

OptimizerBudget parse_budget(const Json &cfg, std::uint64_t seed) {
    OptimizerBudget b;
    b.seed = seed;
    if (!cfg.contains("budget")) return b;
    const Json &j = cfg.at("budget");
    b.restarts = get_or<int>(j, "restarts", b.restarts);
    b.max_iterations = get_or<int>(j, "max_iterations", b.max_iterations);
    b.simplex_tolerance = get_or<double>(j, "simplex_tolerance", b.simplex_tolerance);
    b.n_schedule = get_or<std::vector<int>>(j, "n_schedule", b.n_schedule);
    b.seed = get_or<std::uint64_t>(j, "seed", b.seed);
    b.validate();
    return b;
}

BulkDensity parse_bulk(const Json &j) {
    if (j.is_string()) return bulk_density(j.get<std::string>());
    if (j.is_object()) {
        if (j.contains("about")) return quadratic_about(mat_from_json(j.at("about")));
        return bulk_density(get_or<std::string>(j, "name", ""), get_or<double>(j, "p", 2.0));
    }
    throw InvalidArgument("bulk density must be a name or an object");
}

SurfaceDensity parse_surface(const Json &j) {
    if (!j.is_string()) throw InvalidArgument("surface density must be a name");
    return surface_density(j.get<std::string>());
}

DensitySet parse_densities(const Json &cfg, const char *bulk, const char *surface) {
    const Json d = cfg.value("densities", Json::object());
    return {parse_bulk(d.value("bulk", Json(bulk))), parse_surface(d.value("surface", Json(surface)))};
}

DesignDensitySet parse_design_densities(const Json &cfg) {
    const Json d = cfg.value("densities", Json::object());
    DesignDensitySet ds;
    ds.W0 = parse_bulk(d.value("W0", Json("zero")));
    ds.W1 = parse_bulk(d.value("W1", Json("zero")));
    ds.psi0 = parse_surface(d.value("psi0", Json("abs_normal_jump")));
    ds.psi1 = parse_surface(d.value("psi1", Json("abs_normal_jump")));
    ds.psi2 = pair_density(d.value("psi2", std::string("phase_normal_jump")));
    return ds;
}

// ---------------------------------------------------------------- commands

std::string cmd_sequence(const Context &ctx) {
    const Json &cfg = ctx.cfg;
    const std::string example = get_or<std::string>(cfg, "example", "broken-ramp");
    const auto n_list = get_or<std::vector<int>>(cfg, "n", {1, 2, 4, 8, 16});
    std::optional<StructuredDeformation> sd;
    const char *surface = "norm_jump";
    if (example == "broken-ramp") {
        sd = broken_ramp_sd();
    } else if (example == "deck-of-cards") {
        sd = deck_of_cards_sd();
        surface = "abs_normal_jump";
    } else if (example == "affine") {
        const Mat A = mat_from_json(cfg.at("A")), B = mat_from_json(cfg.at("B"));
        const GridMesh mesh = GridMesh::unit_cube(static_cast<int>(A.cols()));
        sd.emplace(PiecewiseField::affine(mesh, A), std::vector<Mat>(mesh.cell_count(), B));
        surface = "abs_normal_jump";
    } else {
        throw InvalidArgument("unknown sequence example '" + example + "'");
    }
    const int dim = sd->g.mesh().dim();
    const Frame frame = cfg.contains("frame") ? Frame(dim, get_or<std::vector<double>>(cfg, "frame", {}))
                                              : Frame::identity(dim);
    const DensitySet ds = parse_densities(cfg, "zero", surface);
    Table t("staircase approximants u_n of " + example + " with surface density " + ds.psi.name,
            {{"n", "refinement index of u_n"},
             {"l1_error", "integral over the domain of |u_n - g|"},
             {"avg_gradient_gap", "max over cells of the Frobenius distance between the cell average of grad u_n and G"},
             {"singular_tv", "total variation of the jump part of D u_n"},
             {"energy", "E(u_n): int W(grad u_n) dx + int over S(u_n) of Psi([u_n], nu)"},
             {"clamp_energy", "surface energy of the boundary clamp to the trace of g"}});
    for (const auto &r : sequence_report(*sd, frame, n_list, ds))
        t.add({std::to_string(r.n), num(r.l1_error), num(r.avg_gradient_gap), num(r.singular_tv), num(r.energy),
               num(r.clamp_energy)});
    return t.str();
}

struct MatrixCase {
    Mat A, B;
};

std::vector<MatrixCase> matrix_cases(const Context &ctx) {
    std::vector<MatrixCase> cases;
    if (ctx.cfg.contains("cases")) {
        for (const auto &c : ctx.cfg.at("cases")) cases.push_back({mat_from_json(c.at("A")), mat_from_json(c.at("B"))});
        return cases;
    }
    ctx.require_seed("a random matrix sweep");
    const int dim = positive(ctx.cfg, "dim", 2);
    require_dim(dim);
    const int samples = positive(ctx.cfg, "samples", 10);
    const double radius = get_or<double>(ctx.cfg, "radius", 1.0);
    std::mt19937_64 rng(ctx.seed);
    for (int s = 0; s < samples; ++s) {
        Mat A = random_matrix(rng, dim, dim, radius);
        Mat B = random_matrix(rng, dim, dim, radius);
        cases.push_back({A, B});
    }
    return cases;
}

std::string cmd_cell(const Context &ctx) {
    const auto cases = matrix_cases(ctx);
    const DensitySet ds = parse_densities(ctx.cfg, "zero", "abs_normal_jump");
    const OptimizerBudget budget = parse_budget(ctx.cfg, ctx.seed);
    const int res = get_or<int>(ctx.cfg, "oracle_resolution", 0);
    std::vector<std::vector<std::string>> rows(cases.size());
    parallel_for(static_cast<int>(cases.size()), ctx.jobs, [&](int i) {
        const auto &[A, B] = cases[i];
        const Mat M = A - B;
        const int dim = static_cast<int>(A.cols());
        const double mid = frame_oracle(M, ds.psi, res > 0 ? res : default_oracle_resolution(dim));
        const CellSolution sol = estimate_H(A, B, ds, budget);
        const double bulk = ds.W.is_zero() ? 0.0 : ds.W(B);
        std::vector<double> schedule, realized;
        for (const auto &r : sol.realized) {
            schedule.push_back(r.n);
            realized.push_back(r.total());
        }
        rows[i] = {std::to_string(i), flat(A), flat(B), num(mid + bulk), num(sol.value), num(sol.value - mid - bulk),
                   flat(sol.frame.angles), num(sol.frame_value), std::to_string(sol.refinement_n), flat(schedule),
                   flat(realized), sol.laminate ? std::to_string(sol.laminate->axis) : "none"};
    });
    Table t("upper bounds on the bulk cell density H(A,B) with W=" + ds.W.name + " and Psi=" + ds.psi.name,
            {{"case", "input index"},
             {"A", "macroscopic gradient grad g, row-major"},
             {"B", "average gradient G of the competitors, row-major"},
             {"oracle", "W(B) plus the grid minimum over frames of sum_i Psi((A-B) nu_i, nu_i)"},
             {"upper", "simplex-search upper bound on H(A,B)"},
             {"gap", "upper minus oracle"},
             {"angles", "Givens angles of the optimal frame"},
             {"frame_cost", "sum_i Psi((A-B) nu_i, nu_i) on the optimal frame"},
             {"n", "refinement index of the best realized staircase"},
             {"schedule", "refinement indices of the realized staircases"},
             {"realized", "E(u_n) plus boundary clamp of the staircase at each scheduled n"},
             {"laminate_axis", "axis of the two-gradient laminate, if used"}});
    for (auto &r : rows) t.add(std::move(r));
    return t.str();
}

std::string cmd_h_cell(const Context &ctx) {
    const SurfaceDensity psi = parse_densities(ctx.cfg, "zero", "abs_normal_jump").psi;
    const OptimizerBudget budget = parse_budget(ctx.cfg, ctx.seed);
    std::vector<std::pair<Vec, Vec>> cases;
    if (ctx.cfg.contains("cases")) {
        for (const auto &c : ctx.cfg.at("cases")) cases.emplace_back(vec_from_json(c.at("lambda")), vec_from_json(c.at("nu")));
    } else {
        ctx.require_seed("a random jump sweep");
        const int dim = positive(ctx.cfg, "dim", 2);
        require_dim(dim);
        const int samples = positive(ctx.cfg, "samples", 10);
        std::mt19937_64 rng(ctx.seed);
        for (int s = 0; s < samples; ++s) {
            Vec lambda = random_matrix(rng, dim, 1, 2.0);
            cases.emplace_back(lambda, random_unit(rng, dim));
        }
    }
    std::vector<std::vector<std::string>> rows(cases.size());
    parallel_for(static_cast<int>(cases.size()), ctx.jobs, [&](int i) {
        const auto &[lambda, nu] = cases[i];
        const CellSolution sol = estimate_h(lambda, nu, psi, budget);
        const double single = psi(lambda, nu);
        rows[i] = {std::to_string(i), flat(Mat(lambda.transpose())), flat(Mat(nu.transpose())), num(single),
                   num(sol.value), num(single - sol.value), quoted(sol.competitor)};
    });
    Table t("upper bounds on the surface cell density h(lambda,nu) with Psi=" + psi.name,
            {{"case", "input index"},
             {"lambda", "jump vector"},
             {"nu", "unit normal of Q_nu"},
             {"single_jump", "Psi(lambda,nu): cost of one midplane jump"},
             {"upper", "best competitor cost, an upper bound on h(lambda,nu)"},
             {"improvement", "single_jump minus upper"},
             {"competitor", "description of the best competitor"}});
    for (auto &r : rows) t.add(std::move(r));
    return t.str();
}

std::string cmd_verify_expl(const Context &ctx) {
    const auto cases = matrix_cases(ctx);
    const OptimizerBudget budget = parse_budget(ctx.cfg, ctx.seed);
    ExplOptions opt;
    opt.oracle_resolution = get_or<int>(ctx.cfg, "oracle_resolution", 0);
    opt.tolerance = get_or<double>(ctx.cfg, "tolerance", opt.tolerance);
    opt.signed_variants = get_or<bool>(ctx.cfg, "signed", true);
    std::vector<std::vector<std::string>> rows(cases.size());
    parallel_for(static_cast<int>(cases.size()), ctx.jobs, [&](int i) {
        const auto &[A, B] = cases[i];
        const ExplReport r = verify_expl(A, B, budget, opt);
        auto sw = [&](const SandwichValues &v) {
            return std::vector<std::string>{num(v.lower), num(v.mid), num(v.upper), num(v.mid_gap()), num(v.upper_gap())};
        };
        std::vector<std::string> row{std::to_string(i), std::to_string(A.cols()), flat(A), flat(B)};
        for (const auto *v : {&r.abs, &r.plus, &r.minus}) {
            if (!opt.signed_variants && v != &r.abs) {
                row.insert(row.end(), 5, "nan");
                continue;
            }
            auto cols = sw(*v);
            row.insert(row.end(), cols.begin(), cols.end());
        }
        row.push_back(flat(r.frame.angles));
        row.push_back(std::to_string(r.refinement_n));
        rows[i] = std::move(row);
    });
    std::vector<std::pair<std::string, std::string>> cols{{"case", "input index"},
                                                          {"dim", "space dimension N"},
                                                          {"A", "grad g, row-major"},
                                                          {"B", "G, row-major"}};
    for (const auto &[tag, what] : {std::pair<std::string, std::string>{"abs", "|.|"}, {"plus", "positive part"},
                                    {"minus", "negative part"}}) {
        cols.push_back({tag + "_lower", "closed form: " + what + " of tr(A-B)"});
        cols.push_back({tag + "_mid", "grid minimum over frames of the staircase cost for the " + what + " density"});
        cols.push_back({tag + "_upper", "simplex-search upper bound on H(A,B) for the " + what + " density"});
        cols.push_back({tag + "_mid_gap", tag + "_mid minus " + tag + "_lower"});
        cols.push_back({tag + "_upper_gap", tag + "_upper minus " + tag + "_lower"});
    }
    cols.push_back({"angles", "Givens angles of the optimal frame for the |.| density"});
    cols.push_back({"n", "refinement index of the best realized staircase"});
    Table t("sandwich of the closed-form bulk density between lower bound, frame oracle and simplex search", cols);
    for (auto &r : rows) t.add(std::move(r));
    return t.str();
}

std::string cmd_vpm(const Context &ctx) {
    std::vector<std::pair<std::string, StructuredDeformation>> cases;
    const bool examples = get_or<bool>(ctx.cfg, "examples", true);
    if (examples) {
        cases.emplace_back("broken-ramp", broken_ramp_sd());
        cases.emplace_back("deck-of-cards", deck_of_cards_sd());
    }
    if (ctx.cfg.contains("fields"))
        for (const auto &f : ctx.cfg.at("fields")) cases.emplace_back("file", sd_from_json(f));
    const int random = get_or<int>(ctx.cfg, "random", 0);
    if (random > 0) {
        ctx.require_seed("random structured deformations");
        const int dim = positive(ctx.cfg, "dim", 2);
        const int res = positive(ctx.cfg, "resolution", 4);
        const int jumps = get_or<int>(ctx.cfg, "jumps", 0);
        std::mt19937_64 rng(ctx.seed);
        for (int k = 0; k < random; ++k)
            cases.emplace_back("random-" + std::to_string(k), random_piecewise_sd(rng, dim, res, jumps));
    }
    const double tol = get_or<double>(ctx.cfg, "tolerance", 1e-9);
    std::vector<std::vector<std::string>> rows(cases.size());
    parallel_for(static_cast<int>(cases.size()), ctx.jobs, [&](int i) {
        const VpmReport r = verify_vpm_identity(cases[i].second, tol);
        rows[i] = {cases[i].first,       num(r.V_abs),          num(r.V_plus),
                   num(r.V_minus),       num(r.tr_M),           num(r.normal_jump),
                   num(r.residual_plus), num(r.residual_minus), num(r.printed_residual_plus),
                   num(r.printed_residual_minus), num(r.sum_residual)};
    });
    Table t("relaxed energies with the closed-form densities and the identity linking them",
            {{"case", "structured deformation"},
             {"V_abs", "I(g,G) with H=|tr(A-B)| and h=|lambda.nu|"},
             {"V_plus", "I(g,G) with H=(tr(A-B))^+ and h=(lambda.nu)^+"},
             {"V_minus", "I(g,G) with H=(tr(A-B))^- and h=(lambda.nu)^-"},
             {"tr_M", "integral of tr(grad g - G)"},
             {"normal_jump", "integral over S(g) of [g].nu"},
             {"residual_plus", "relative residual of V_plus = V_abs/2 + (tr_M + normal_jump)/2"},
             {"residual_minus", "relative residual of V_minus = V_abs/2 - (tr_M + normal_jump)/2"},
             {"bulk_residual_plus", "relative residual of V_plus = V_abs/2 + tr_M/2"},
             {"bulk_residual_minus", "relative residual of V_minus = V_abs/2 - tr_M/2"},
             {"sum_residual", "|V_plus + V_minus - V_abs|"}});
    for (auto &r : rows) t.add(std::move(r));
    return t.str();
}

std::string cmd_design(const Context &ctx) {
    const DesignDensitySet ds = parse_design_densities(ctx.cfg);
    const OptimizerBudget budget = parse_budget(ctx.cfg, ctx.seed);
    if (!ctx.cfg.contains("cases")) throw InvalidArgument("design needs a list of cases");
    const Json cases = ctx.cfg.at("cases");
    std::vector<std::vector<std::string>> rows(cases.size());
    parallel_for(static_cast<int>(cases.size()), ctx.jobs, [&](int i) {
        const Json &c = cases[i];
        const std::string kind = get_or<std::string>(c, "kind", "h");
        if (kind == "h") {
            DesignBoundaryData d{get_or<int>(c, "a", 0), get_or<int>(c, "b", 0), vec_from_json(c.at("c")),
                                 vec_from_json(c.at("d")), vec_from_json(c.at("nu"))};
            const CellSolution sol = estimate_h_design(d, ds, budget);
            rows[i] = {std::to_string(i), "h",
                       quoted("a=" + std::to_string(d.a) + " b=" + std::to_string(d.b) + " c=" +
                              flat(Mat(d.c.transpose())) + " d=" + flat(Mat(d.d.transpose())) +
                              " nu=" + flat(Mat(d.nu.transpose()))),
                       num(sol.value), quoted(sol.competitor)};
        } else if (kind == "H") {
            const int phase = get_or<int>(c, "phase", 0);
            const Mat A = mat_from_json(c.at("A")), B = mat_from_json(c.at("B"));
            const CellSolution sol = estimate_H_design(phase, A, B, ds, budget);
            rows[i] = {std::to_string(i), "H",
                       quoted("phase=" + std::to_string(phase) + " A=" + flat(A) + " B=" + flat(B)), num(sol.value),
                       quoted(sol.competitor)};
        } else {
            throw InvalidArgument("design case kind must be 'h' or 'H'");
        }
    });
    Table t("upper bounds on the two-phase relaxed densities H(i,A,B) and h(a,b,c,d,nu)",
            {{"case", "input index"},
             {"kind", "H for the bulk density of phase i, h for the interface density"},
             {"inputs", "arguments of the density"},
             {"upper", "best competitor energy, an upper bound"},
             {"competitor", "description of the best competitor"}});
    for (auto &r : rows) t.add(std::move(r));
    return t.str();
}

std::string cmd_validate_densities(const Context &ctx) {
    std::vector<std::string> names;
    if (ctx.cfg.contains("density")) names.push_back(get_or<std::string>(ctx.cfg, "density", ""));
    if (ctx.cfg.contains("densities")) {
        auto more = get_or<std::vector<std::string>>(ctx.cfg, "densities", {});
        names.insert(names.end(), more.begin(), more.end());
    }
    if (names.empty()) throw InvalidArgument("validate-densities needs 'density' or 'densities'");
    const std::string kind = get_or<std::string>(ctx.cfg, "kind", "");
    SamplingOptions opt;
    opt.samples = positive(ctx.cfg, "samples", opt.samples);
    opt.radius = get_or<double>(ctx.cfg, "radius", opt.radius);
    opt.dim = positive(ctx.cfg, "dim", opt.dim);
    opt.seed = ctx.seed;
    const auto surf = surface_density_names(), pair = pair_density_names(), bulk = bulk_density_names();
    auto has = [](const std::vector<std::string> &v, const std::string &s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    Table t("sampled checks of the density hypotheses",
            {{"density", "registry name"},
             {"kind", "surface (H2-H4), pair (H5-H8) or bulk (H1)"},
             {"hypothesis", "checked property"},
             {"status", "pass, warn (coercivity lower bound only) or fail"},
             {"worst", "largest observed violation (H1: largest Lipschitz ratio)"},
             {"witness", "sample attaining it"}});
    for (const auto &name : names) {
        HypothesisReport rep;
        std::string k = kind;
        if (k.empty()) k = has(surf, name) ? "surface" : has(pair, name) ? "pair" : "bulk";
        if (k == "surface") rep = check_H2_H3_H4(surface_density(name), opt);
        else if (k == "pair") rep = check_H5_to_H8(pair_density(name), opt);
        else if (k == "bulk") rep = check_H1(bulk_density(name, get_or<double>(ctx.cfg, "p", 2.0)), opt);
        else throw InvalidArgument("density kind must be surface, pair or bulk");
        for (const auto &c : rep.checks)
            t.add({name, k, c.hypothesis, to_string(c.status), num(c.worst), quoted(c.witness)});
    }
    return t.str();
}

Json error_report(const char *kind, const std::string &message) {
    return {{"error", kind}, {"message", message}};
}

}  // namespace

RunResult run(const Json &config, const RunOptions &options) {
    RunResult result;
    try {
        if (!config.is_object()) throw InvalidArgument("config must be a JSON object");
        const std::string command = get_or<std::string>(config, "command", "");
        const std::uint64_t seed = options.seed ? *options.seed : get_or<std::uint64_t>(config, "seed", 0);
        if (options.jobs < 1) throw InvalidArgument("--jobs must be at least 1");
        const Context ctx{config, seed, options.jobs, options.seed || config.contains("seed")};
        static const std::map<std::string, std::string (*)(const Context &)> table{
            {"sequence", cmd_sequence},       {"cell", cmd_cell}, {"h-cell", cmd_h_cell},
            {"verify-expl", cmd_verify_expl}, {"vpm", cmd_vpm},   {"design", cmd_design},
            {"validate-densities", cmd_validate_densities}};
        const auto it = table.find(command);
        if (it == table.end()) throw InvalidArgument("unknown command '" + command + "'");
        result.csv = it->second(ctx);

        std::optional<std::string> path = options.output;
        if (!path && config.contains("output")) path = get_or<std::string>(config, "output", "");
        if (path && !path->empty()) {
            std::ofstream out(*path, std::ios::binary);
            if (!out) throw IoError("cannot open output file " + *path);
            out << result.csv;
            out.close();
            if (!out) throw IoError("failed writing output file " + *path);
            result.written = *path;
        }
    } catch (const InvalidArgument &e) {
        result.exit_code = kExitConfig;
        result.error = error_report("config", e.what()).dump();
    } catch (const Json::exception &e) {
        result.exit_code = kExitConfig;
        result.error = error_report("config", e.what()).dump();
    } catch (const NumericalError &e) {
        result.exit_code = kExitNumerical;
        result.error = error_report("numerical", e.what()).dump();
    } catch (const IoError &e) {
        result.exit_code = kExitIo;
        result.error = error_report("io", e.what()).dump();
    } catch (const std::exception &e) {
        result.exit_code = kExitNumerical;
        result.error = error_report("internal", e.what()).dump();
    }
    if (result.exit_code != kExitOk) result.csv.clear();
    return result;
}

}  // namespace sdrelax
