#include "sdrelax/optdesign.hpp"

#include "sdrelax/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace sdrelax {

namespace {

constexpr double kCoplanarTol = 1e-10;

// Grid face carrying a planar piece, if the piece lies on one.
struct FaceHit {
    int axis;
    int lower_cell;
    int upper_cell;
};

std::optional<FaceHit> grid_face_of(const GridMesh &mesh, const Vec &normal, double offset, const Vec &centroid) {
    const Vec local = mesh.rotation().transpose() * normal;
    for (int a = 0; a < mesh.dim(); ++a) {
        if (std::abs(std::abs(local(a)) - 1.0) > kOrthoTol) continue;
        const double coord = offset * local(a);
        for (double line : mesh.grid_lines(a)) {
            if (std::abs(coord - line) > kCoplanarTol) continue;
            const double h = mesh.cell_size()(a);
            Vec y = mesh.to_local(centroid);
            y(a) = line - 0.5 * h;
            const int lo = mesh.locate(mesh.to_physical(y));
            y(a) = line + 0.5 * h;
            return FaceHit{a, lo, mesh.locate(mesh.to_physical(y))};
        }
        return std::nullopt;
    }
    return std::nullopt;
}

double bulk_energy(const PhaseField &chi, const PiecewiseField &u, const DesignDensitySet &ds) {
    const double vol = u.mesh().volume() / u.mesh().cell_count();
    double total = 0.0;
    for (int c = 0; c < u.mesh().cell_count(); ++c) {
        const BulkDensity &W = ds.bulk(chi.value(c));
        if (!W.is_zero()) total += W(u.cells()[c].gradient) * vol;
    }
    return total;
}

}  // namespace

PhaseField::PhaseField(GridMesh mesh, std::vector<int> values) : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != mesh_.cell_count())
        throw InvalidArgument("phase field needs one value per cell");
    for (int v : values_)
        if (v != 0 && v != 1) throw InvalidArgument("phase values must be 0 or 1");
    const Vec h = mesh_.cell_size();
    for (int idx = 0; idx < mesh_.cell_count(); ++idx) {
        const auto coords = mesh_.cell_coords(idx);
        for (int a = 0; a < mesh_.dim(); ++a) {
            if (coords[a] + 1 >= mesh_.resolution(a)) continue;
            auto next = coords;
            ++next[a];
            const int up = mesh_.cell_index(next);
            if (values_[idx] == values_[up]) continue;
            double area = 1.0;
            for (int k = 0; k < mesh_.dim(); ++k)
                if (k != a) area *= h(k);
            const geometry::Box b = mesh_.cell_box(idx);
            Vec centre = b.center();
            centre(a) = b.hi(a);
            interfaces_.push_back(
                {idx, up, a, Vec(mesh_.rotation().col(a)), area, mesh_.to_physical(centre)});
        }
    }
}

PhaseField PhaseField::constant(const GridMesh &mesh, int value) {
    return PhaseField(mesh, std::vector<int>(mesh.cell_count(), value));
}

PhaseField PhaseField::half_space(const GridMesh &mesh, int axis, double at) {
    if (axis < 0 || axis >= mesh.dim()) throw InvalidArgument("half_space: axis out of range");
    std::vector<int> values(mesh.cell_count());
    for (int c = 0; c < mesh.cell_count(); ++c) values[c] = mesh.cell_box(c).center()(axis) >= at ? 1 : 0;
    return PhaseField(mesh, std::move(values));
}

double perimeter(const PhaseField &chi) {
    double total = 0.0;
    for (const auto &i : chi.interfaces()) total += i.area;
    return total;
}

double design_energy(const PhaseField &chi, const PiecewiseField &u, const DesignDensitySet &ds) {
    if (!chi.mesh().same_mesh(u.mesh())) throw InvalidArgument("design_energy: phase field and deformation meshes differ");
    const GridMesh &mesh = u.mesh();
    double total = bulk_energy(chi, u, ds);
    for (int fi = 0; fi < static_cast<int>(u.facets().size()); ++fi) {
        const JumpFacet &f = u.facets()[fi];
        for (const auto &piece : facet_pieces(u, fi)) {
            const Vec x = piece.centroid();
            const double area = piece.measure();
            const auto hit = grid_face_of(mesh, f.normal, f.offset, x);
            if (hit && chi.value(hit->lower_cell) != chi.value(hit->upper_cell)) {
                // The + side of the facet is where its normal points.
                const bool normal_up = mesh.rotation().col(hit->axis).dot(f.normal) > 0.0;
                const int plus = chi.value(normal_up ? hit->upper_cell : hit->lower_cell);
                const int minus = chi.value(normal_up ? hit->lower_cell : hit->upper_cell);
                const int minus_cell = normal_up ? hit->lower_cell : hit->upper_cell;
                const Vec below = u.cells()[minus_cell](x) + u.jumps_at(x, fi);
                total += ds.psi2(plus, minus, Vec(below + f.jump), below, f.normal) * area;
                continue;
            }
            const int phase = hit ? chi.value(hit->lower_cell) : chi.value_at(x);
            total += ds.surface(phase)(f.jump, f.normal) * area;
        }
    }
    total += perimeter(chi);
    if (!std::isfinite(total)) throw NumericalError("design energy is not finite");
    return total;
}

CellSolution estimate_H_design(int phase, const Mat &A, const Mat &B, const DesignDensitySet &ds,
                               const OptimizerBudget &budget) {
    if (phase != 0 && phase != 1) throw InvalidArgument("phase must be 0 or 1");
    return estimate_H(A, B, ds.phase(phase), budget);
}

void DesignBoundaryData::validate() const {
    if ((a != 0 && a != 1) || (b != 0 && b != 1)) throw InvalidArgument("phase boundary values must be 0 or 1");
    if (c.size() != d.size() || c.size() != nu.size()) throw InvalidArgument("boundary data dimensions differ");
    require_dim(static_cast<int>(nu.size()));
    if (!is_finite(c) || !is_finite(d)) throw InvalidArgument("boundary data must be finite");
    if (std::abs(nu.norm() - 1.0) > kOrthoTol) throw InvalidArgument("boundary normal must have unit length");
}

namespace {

// One plane of a layered competitor, listed bottom to top.
struct Event {
    bool chi_changes;
    bool u_changes;
};

// All merges of r phase changes and s deformation changes, allowing
// coincident planes.
void interleavings(int r, int s, std::vector<Event> &prefix, std::vector<std::vector<Event>> &out) {
    if (r == 0 && s == 0) {
        out.push_back(prefix);
        return;
    }
    const Event options[] = {{true, false}, {false, true}, {true, true}};
    for (const auto &e : options) {
        const int nr = r - (e.chi_changes ? 1 : 0), ns = s - (e.u_changes ? 1 : 0);
        if (nr < 0 || ns < 0) continue;
        prefix.push_back(e);
        interleavings(nr, ns, prefix, out);
        prefix.pop_back();
    }
}

std::string profile_text(const std::vector<int> &chi, int u_layers, const std::vector<Event> &events) {
    std::ostringstream os;
    os << "chi";
    for (int v : chi) os << ' ' << v;
    os << ", " << u_layers << " u layers, planes";
    for (const auto &e : events) os << ' ' << (e.chi_changes && e.u_changes ? "both" : e.chi_changes ? "chi" : "u");
    return os.str();
}

}  // namespace

CellSolution estimate_h_design(const DesignBoundaryData &data, const DesignDensitySet &ds, const OptimizerBudget &budget) {
    data.validate();
    budget.validate();
    const int dim = static_cast<int>(data.nu.size());
    const Vec &nu = data.nu;

    // Phase profiles from b (bottom) to a (top).
    std::vector<std::vector<int>> chi_profiles;
    if (data.a == data.b) {
        chi_profiles = {{data.b}, {data.b, 1 - data.b, data.a}};
    } else {
        chi_profiles = {{data.b, data.a}};
    }
    // Deformation profiles from d to c: 1 layer when c = d, then 2 and 3
    // layers; the middle value of 3 layers is optimized.
    std::vector<int> u_layer_counts;
    if (data.c == data.d) u_layer_counts.push_back(1);
    else u_layer_counts.push_back(2);
    u_layer_counts.push_back(3);

    CellSolution best;
    best.frame = Frame::identity(dim);
    best.value = std::numeric_limits<double>::infinity();

    for (const auto &chi : chi_profiles) {
        for (int layers : u_layer_counts) {
            std::vector<std::vector<Event>> patterns;
            std::vector<Event> prefix;
            interleavings(static_cast<int>(chi.size()) - 1, layers - 1, prefix, patterns);
            for (const auto &events : patterns) {
                auto cost = [&](const std::vector<double> &mid) {
                    std::vector<Vec> u_values{data.d};
                    if (layers == 3) u_values.push_back(Eigen::Map<const Eigen::VectorXd>(mid.data(), dim));
                    if (layers >= 2) u_values.push_back(data.c);
                    int ci = 0, ui = 0;
                    double total = 0.0;
                    for (const auto &e : events) {
                        const int chi_lo = chi[ci], chi_hi = e.chi_changes ? chi[ci + 1] : chi[ci];
                        if (e.u_changes) {
                            const Vec &lo = u_values[ui], &hi = u_values[ui + 1];
                            if (e.chi_changes)
                                total += ds.psi2(chi_hi, chi_lo, hi, lo, nu);
                            else
                                total += ds.surface(chi_lo)(Vec(hi - lo), nu);
                            ++ui;
                        }
                        if (e.chi_changes) {
                            total += 1.0;
                            ++ci;
                        }
                    }
                    return total;
                };
                double value;
                std::vector<double> mid;
                if (layers == 3) {
                    auto starts = start_points(dim, budget.restarts, -1.0, 1.0, budget.seed + 7);
                    const Vec centre = 0.5 * (data.c + data.d);
                    const double spread = 1.0 + (data.c - data.d).norm();
                    for (auto &s : starts)
                        for (int k = 0; k < dim; ++k) s[k] = centre(k) + spread * s[k];
                    value = std::numeric_limits<double>::infinity();
                    for (const auto &s : starts) {
                        const auto r = nelder_mead(cost, s, {budget.max_iterations, budget.simplex_tolerance, 0.5});
                        if (std::isfinite(r.value) && r.value < value) {
                            value = r.value;
                            mid = r.x;
                        }
                    }
                } else {
                    value = cost({});
                }
                if (std::isinf(best.value) ? std::isfinite(value) : value < best.value - 1e-12 * (1.0 + best.value)) {
                    best.value = value;
                    best.apex = mid;
                    best.competitor = profile_text(chi, layers, events);
                }
            }
        }
    }
    if (!std::isfinite(best.value)) throw NumericalError("interface cell problem produced no finite competitor");
    best.frame_value = best.value;
    return best;
}

double relaxed_design_energy(const PhaseField &chi, const StructuredDeformation &sd, const DesignRelaxedTables &tables) {
    const PiecewiseField &g = sd.g;
    if (!chi.mesh().same_mesh(g.mesh())) throw InvalidArgument("relaxed_design_energy: meshes differ");
    const GridMesh &mesh = g.mesh();
    const double vol = mesh.volume() / mesh.cell_count();
    double total = 0.0;
    for (int c = 0; c < mesh.cell_count(); ++c) total += tables.H(chi.value(c), sd.grad_g(c), sd.G[c]) * vol;

    std::vector<std::pair<int, double>> covered;  // (axis, grid coordinate) planes carrying a jump of g
    for (int fi = 0; fi < static_cast<int>(g.facets().size()); ++fi) {
        const JumpFacet &f = g.facets()[fi];
        for (const auto &piece : facet_pieces(g, fi)) {
            const Vec x = piece.centroid();
            const auto hit = grid_face_of(mesh, f.normal, f.offset, x);
            int plus, minus, minus_cell;
            if (hit) {
                const bool normal_up = mesh.rotation().col(hit->axis).dot(f.normal) > 0.0;
                plus = chi.value(normal_up ? hit->upper_cell : hit->lower_cell);
                minus_cell = normal_up ? hit->lower_cell : hit->upper_cell;
                minus = chi.value(minus_cell);
                const Vec local = mesh.rotation().transpose() * f.normal;
                covered.emplace_back(hit->axis, f.offset * local(hit->axis));
            } else {
                minus_cell = mesh.locate(x);
                plus = minus = chi.value(minus_cell);
            }
            const Vec below = g.cells()[minus_cell](x) + g.jumps_at(x, fi);
            total += tables.h(plus, minus, Vec(below + f.jump), below, f.normal) * piece.measure();
        }
    }
    for (const auto &i : chi.interfaces()) {
        const double coord = mesh.to_local(i.centroid)(i.axis);
        const bool on_jump = std::any_of(covered.begin(), covered.end(), [&](const auto &p) {
            return p.first == i.axis && std::abs(p.second - coord) <= kCoplanarTol;
        });
        if (on_jump) continue;
        const Vec value = g.evaluate(i.centroid);
        total += tables.h(chi.value(i.upper_cell), chi.value(i.lower_cell), value, value, i.normal) * i.area;
    }
    if (!std::isfinite(total)) throw NumericalError("relaxed design energy is not finite");
    return total;
}

DesignRelaxedTables estimated_design_tables(const DesignDensitySet &ds, const OptimizerBudget &budget) {
    return {[ds, budget](int phase, const Mat &A, const Mat &B) { return estimate_H_design(phase, A, B, ds, budget).value; },
            [ds, budget](int a, int b, const Vec &c, const Vec &d, const Vec &nu) {
                return estimate_h_design(DesignBoundaryData{a, b, c, d, nu}, ds, budget).value;
            }};
}

}  // namespace sdrelax
