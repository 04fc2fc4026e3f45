#include "sdrelax/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sdrelax {

using geometry::Box;
using geometry::ConvexCell;
using geometry::FlatPiece;
using geometry::Plane;

namespace {

constexpr double kSideTol = 1e-12;
constexpr double kContinuityTol = 1e-10;

std::string str(int v) { return std::to_string(v); }

Box make_box(int dim, double lo, double hi) {
    require_dim(dim);
    return Box{Vec::Constant(dim, lo), Vec::Constant(dim, hi)};
}

FlatPiece map_piece(const FlatPiece &p, const Mat &R) {
    FlatPiece out{p.dim, {}};
    out.vertices.reserve(p.vertices.size());
    for (const auto &v : p.vertices) out.vertices.push_back(R * v);
    return out;
}

// Offsets of parallel planes grouped by (local) normal.
struct PlaneGroup {
    Vec normal;
    std::vector<double> offsets;
};

void add_plane(std::vector<PlaneGroup> &groups, const Vec &normal, double offset) {
    for (auto &g : groups) {
        if (std::abs(g.normal.dot(normal) - 1.0) <= kOrthoTol) {
            g.offsets.push_back(offset);
            return;
        }
        if (std::abs(g.normal.dot(normal) + 1.0) <= kOrthoTol) {
            g.offsets.push_back(-offset);
            return;
        }
    }
    groups.push_back({normal, {offset}});
}

void add_facet_planes(std::vector<PlaneGroup> &groups, const PiecewiseField &u) {
    const Mat &R = u.mesh().rotation();
    for (const auto &f : u.facets()) add_plane(groups, R.transpose() * f.normal, f.offset);
}

void add_grid_planes(std::vector<PlaneGroup> &groups, const GridMesh &mesh) {
    for (int a = 0; a < mesh.dim(); ++a)
        for (double c : mesh.grid_lines(a)) add_plane(groups, unit_vector(mesh.dim(), a), c);
}

template <class Piece>
std::vector<Piece> cut(std::vector<Piece> pieces, std::vector<PlaneGroup> groups) {
    for (auto &g : groups) {
        std::sort(g.offsets.begin(), g.offsets.end());
        g.offsets.erase(std::unique(g.offsets.begin(), g.offsets.end(),
                                    [](double a, double b) { return std::abs(a - b) <= kSideTol; }),
                        g.offsets.end());
        pieces = geometry::slice(pieces, g.normal, g.offsets);
    }
    return pieces;
}

// Affine map y -> W y + o on a piece in local coordinates; integrates |.|
// exactly when only one component is active (split at its zero), by
// quadrature otherwise.
template <class Piece>
double integrate_abs_affine(const Piece &piece, const Mat &W, const Vec &o) {
    const double scale = W.norm() + o.norm();
    if (scale == 0.0) return 0.0;
    auto norm_at = [&](const Vec &y) { return Vec(W * y + o).norm(); };
    int active = -1, count = 0;
    for (int r = 0; r < W.rows(); ++r) {
        if (W.row(r).norm() + std::abs(o(r)) > 1e-14 * scale) {
            active = r;
            ++count;
        }
    }
    if (count == 1) {
        const Vec grad = W.row(active).transpose();
        const double len = grad.norm();
        if (len > 0.0) {
            const auto [below, above] = piece.split(Plane{grad / len, -o(active) / len});
            double total = 0.0;
            if (below) total += below->integrate(norm_at);
            if (above) total += above->integrate(norm_at);
            return total;
        }
    }
    return piece.integrate(norm_at);
}

}  // namespace

// ---------------------------------------------------------------- GridMesh

GridMesh::GridMesh(Box box, int resolution, std::optional<Mat> rotation)
    : GridMesh(box, std::vector<int>(std::max<int>(1, box.dim()), resolution), std::move(rotation)) {}

GridMesh::GridMesh(Box box, std::vector<int> counts, std::optional<Mat> rotation)
    : box_(std::move(box)), counts_(std::move(counts)) {
    const int n = box_.dim();
    require_dim(n);
    if (box_.hi.size() != n) throw InvalidArgument("mesh box corners differ in dimension");
    if (!is_finite(box_.lo) || !is_finite(box_.hi) || ((box_.hi - box_.lo).array() <= 0.0).any())
        throw InvalidArgument("mesh domain must have positive volume");
    if (static_cast<int>(counts_.size()) != n) throw InvalidArgument("mesh needs one cell count per axis");
    for (int c : counts_)
        if (c < 1) throw InvalidArgument("mesh resolution must be at least 1, got " + str(c));
    rotation_ = Mat::Identity(n, n);
    if (rotation) {
        if (rotation->rows() != n || rotation->cols() != n)
            throw InvalidArgument("mesh rotation has the wrong shape");
        if (!is_finite(*rotation) ||
            (rotation->transpose() * *rotation - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > kOrthoTol * 10)
            throw InvalidArgument("mesh rotation must be orthogonal");
        rotation_ = *rotation;
        rotated_ = (rotation_ - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 0.0;
    }
}

GridMesh GridMesh::unit_cube(int dim, int resolution) { return GridMesh(make_box(dim, -0.5, 0.5), resolution); }

GridMesh GridMesh::unit_box(int dim, int resolution) { return GridMesh(make_box(dim, 0.0, 1.0), resolution); }

GridMesh GridMesh::rotated_cube(const Vec &nu, int resolution) {
    const int dim = static_cast<int>(nu.size());
    return GridMesh(make_box(dim, -0.5, 0.5), resolution, rotation_with_last_column(nu));
}

bool GridMesh::is_uniform() const {
    return std::all_of(counts_.begin(), counts_.end(), [&](int c) { return c == counts_.front(); });
}

int GridMesh::cell_count() const {
    return std::accumulate(counts_.begin(), counts_.end(), 1, std::multiplies<int>());
}

Vec GridMesh::cell_size() const {
    Vec h = box_.hi - box_.lo;
    for (int a = 0; a < dim(); ++a) h(a) /= counts_[a];
    return h;
}

Vec GridMesh::to_local(const Vec &x) const { return rotated_ ? Vec(rotation_.transpose() * x) : x; }
Vec GridMesh::to_physical(const Vec &y) const { return rotated_ ? Vec(rotation_ * y) : y; }

std::vector<int> GridMesh::cell_coords(int index) const {
    if (index < 0 || index >= cell_count()) throw InvalidArgument("cell index out of range: " + str(index));
    std::vector<int> c(dim());
    for (int a = 0; a < dim(); ++a) {
        c[a] = index % counts_[a];
        index /= counts_[a];
    }
    return c;
}

int GridMesh::cell_index(const std::vector<int> &coords) const {
    int index = 0;
    for (int a = dim() - 1; a >= 0; --a) {
        if (coords[a] < 0 || coords[a] >= counts_[a]) throw InvalidArgument("cell coordinates out of range");
        index = index * counts_[a] + coords[a];
    }
    return index;
}

Box GridMesh::cell_box(int index) const {
    const auto c = cell_coords(index);
    const Vec h = cell_size();
    Box b{box_.lo, box_.lo};
    for (int a = 0; a < dim(); ++a) {
        b.lo(a) = box_.lo(a) + c[a] * h(a);
        b.hi(a) = c[a] + 1 == counts_[a] ? box_.hi(a) : box_.lo(a) + (c[a] + 1) * h(a);
    }
    return b;
}

bool GridMesh::contains(const Vec &x, double tol) const {
    return x.size() == dim() && box_.contains(to_local(x), tol);
}

int GridMesh::locate(const Vec &x) const {
    if (x.size() != dim()) throw InvalidArgument("point dimension does not match mesh");
    if (!contains(x)) throw InvalidArgument("point outside the mesh domain");
    const Vec y = to_local(x);
    const Vec h = cell_size();
    std::vector<int> c(dim());
    for (int a = 0; a < dim(); ++a) {
        const int j = static_cast<int>(std::floor((y(a) - box_.lo(a)) / h(a)));
        c[a] = std::clamp(j, 0, counts_[a] - 1);
    }
    return cell_index(c);
}

std::vector<double> GridMesh::grid_lines(int axis) const {
    std::vector<double> lines;
    const double h = (box_.hi(axis) - box_.lo(axis)) / counts_[axis];
    for (int k = 1; k < counts_[axis]; ++k) lines.push_back(box_.lo(axis) + k * h);
    return lines;
}

bool GridMesh::same_domain(const GridMesh &other, double tol) const {
    if (dim() != other.dim()) return false;
    return (box_.lo - other.box_.lo).cwiseAbs().maxCoeff() <= tol &&
           (box_.hi - other.box_.hi).cwiseAbs().maxCoeff() <= tol &&
           (rotation_ - other.rotation_).cwiseAbs().maxCoeff() <= tol;
}

bool GridMesh::same_mesh(const GridMesh &other, double tol) const {
    return same_domain(other, tol) && counts_ == other.counts_;
}

// ------------------------------------------------------------------ Affine

Affine Affine::constant(const Vec &value, int dim) { return {Mat::Zero(value.size(), dim), value}; }
Affine Affine::linear(const Mat &A) { return {A, Vec::Zero(A.rows())}; }

// ---------------------------------------------------------- PiecewiseField

PiecewiseField::PiecewiseField(GridMesh mesh, std::vector<Affine> cells, std::vector<JumpFacet> facets,
                               std::optional<Affine> trace)
    : mesh_(std::move(mesh)), cells_(std::move(cells)), facets_(std::move(facets)), trace_(std::move(trace)) {
    validate();
}

PiecewiseField PiecewiseField::affine(const GridMesh &mesh, const Mat &A, const Vec &b) {
    return PiecewiseField(mesh, std::vector<Affine>(mesh.cell_count(), Affine{A, b}));
}

PiecewiseField PiecewiseField::affine(const GridMesh &mesh, const Mat &A) {
    return affine(mesh, A, Vec::Zero(A.rows()));
}

JumpFacet PiecewiseField::plane_facet(const GridMesh &mesh, const Vec &normal, double offset, const Vec &jump) {
    if (normal.size() != mesh.dim()) throw InvalidArgument("facet normal dimension does not match mesh");
    if (!is_finite(normal) || std::abs(normal.norm() - 1.0) > kOrthoTol)
        throw InvalidArgument("facet normal must have unit length");
    if (!std::isfinite(offset) || !is_finite(jump)) throw InvalidArgument("facet data must be finite");
    const Vec local = mesh.rotation().transpose() * normal;
    auto section = ConvexCell::from_box(mesh.box()).section(Plane{local, offset});
    if (!section) throw InvalidArgument("facet plane does not cut the interior of the domain");
    return JumpFacet{normal, offset, map_piece(*section, mesh.rotation()), jump};
}

void PiecewiseField::validate() {
    const int n = mesh_.dim();
    if (static_cast<int>(cells_.size()) != mesh_.cell_count())
        throw InvalidArgument("field has " + str(static_cast<int>(cells_.size())) + " cells, mesh has " +
                              str(mesh_.cell_count()));
    value_dim_ = static_cast<int>(cells_.front().offset.size());
    if (value_dim_ < 1 || value_dim_ > 3) throw InvalidArgument("field values must have dimension 1, 2 or 3");
    for (const auto &c : cells_) {
        if (c.gradient.rows() != value_dim_ || c.gradient.cols() != n || c.offset.size() != value_dim_)
            throw InvalidArgument("cell affine map has inconsistent shape");
        if (!is_finite(c.gradient) || !is_finite(c.offset)) throw InvalidArgument("cell affine map is not finite");
    }
    if (trace_) {
        if (trace_->gradient.rows() != value_dim_ || trace_->gradient.cols() != n ||
            trace_->offset.size() != value_dim_ || !is_finite(trace_->gradient) || !is_finite(trace_->offset))
            throw InvalidArgument("boundary trace has inconsistent shape");
    }

    // Canonical facet geometry and merging of coplanar facets.
    std::vector<JumpFacet> merged;
    for (const auto &f : facets_) {
        if (f.jump.size() != value_dim_) throw InvalidArgument("facet jump dimension does not match field");
        JumpFacet canon = plane_facet(mesh_, f.normal, f.offset, f.jump);
        if (!f.polygon.vertices.empty()) {
            const double given = f.polygon.measure(), exact = canon.area();
            if (std::abs(given - exact) > 1e-9 * std::max(1.0, exact))
                throw InvalidArgument("facet polygon is not the cross-section of the domain by its plane");
        }
        bool absorbed = false;
        for (auto &m : merged) {
            const double cosang = m.normal.dot(canon.normal);
            if (std::abs(cosang - 1.0) <= kOrthoTol && std::abs(m.offset - canon.offset) <= kSideTol) {
                m.jump += canon.jump;
                absorbed = true;
                break;
            }
            if (std::abs(cosang + 1.0) <= kOrthoTol && std::abs(m.offset + canon.offset) <= kSideTol)
                throw InvalidArgument("coplanar facets with opposite orientation");
        }
        if (!absorbed) merged.push_back(std::move(canon));
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const JumpFacet &f) { return f.jump.isZero(0.0); }),
                 merged.end());
    facets_ = std::move(merged);

    // Continuity of the cell part across shared grid faces.
    for (int idx = 0; idx < mesh_.cell_count(); ++idx) {
        const auto coords = mesh_.cell_coords(idx);
        const Box b = mesh_.cell_box(idx);
        for (int a = 0; a < n; ++a) {
            if (coords[a] + 1 >= mesh_.resolution(a)) continue;
            auto next = coords;
            ++next[a];
            const Affine &p = cells_[idx], &q = cells_[mesh_.cell_index(next)];
            Box face = b;
            face.lo(a) = b.hi(a);
            for (const auto &corner : face.corners()) {
                const Vec x = mesh_.to_physical(corner);
                const Vec vp = p(x), vq = q(x);
                const double scale = 1.0 + std::max(vp.cwiseAbs().maxCoeff(), vq.cwiseAbs().maxCoeff());
                if ((vp - vq).cwiseAbs().maxCoeff() > kContinuityTol * scale)
                    throw InvalidArgument("cell affine maps " + str(idx) + " and " + str(mesh_.cell_index(next)) +
                                          " disagree on their shared face");
            }
        }
    }
}

Vec PiecewiseField::jumps_at(const Vec &x, int skip) const {
    Vec acc = Vec::Zero(value_dim_);
    for (int i = 0; i < static_cast<int>(facets_.size()); ++i) {
        if (i == skip) continue;
        const auto &f = facets_[i];
        if (x.dot(f.normal) >= f.offset - kSideTol) acc += f.jump;
    }
    return acc;
}

Affine PiecewiseField::local_affine(const Vec &x) const {
    Affine a = cells_[mesh_.locate(x)];
    a.offset += jumps_at(x);
    return a;
}

Vec PiecewiseField::evaluate(const Vec &x) const {
    const Affine &a = cells_[mesh_.locate(x)];
    return a(x) + jumps_at(x);
}

// --------------------------------------------------- StructuredDeformation

StructuredDeformation::StructuredDeformation(PiecewiseField g_, std::vector<Mat> G_)
    : g(std::move(g_)), G(std::move(G_)) {
    if (static_cast<int>(G.size()) != g.mesh().cell_count())
        throw InvalidArgument("G needs one matrix per cell of g's mesh");
    for (const auto &m : G) {
        if (m.rows() != g.value_dim() || m.cols() != g.mesh().dim())
            throw InvalidArgument("G has the wrong shape");
        if (!is_finite(m)) throw InvalidArgument("G entries must be finite");
    }
}

Mat StructuredDeformation::disarrangement(int cell) const { return disarrangement_tensor(grad_g(cell), G[cell]); }

// ------------------------------------------------------------ measurements

double l1_distance(const PiecewiseField &u, const PiecewiseField &v) {
    if (!u.mesh().same_domain(v.mesh())) throw InvalidArgument("l1_distance: fields live on different domains");
    if (u.value_dim() != v.value_dim()) throw InvalidArgument("l1_distance: value dimensions differ");
    const GridMesh &mesh = u.mesh();
    const Mat &R = mesh.rotation();
    std::vector<PlaneGroup> groups;
    add_grid_planes(groups, u.mesh());
    add_grid_planes(groups, v.mesh());
    add_facet_planes(groups, u);
    add_facet_planes(groups, v);
    const auto pieces = cut(std::vector<ConvexCell>{ConvexCell::from_box(mesh.box())}, groups);
    double total = 0.0;
    for (const auto &piece : pieces) {
        const Vec x = mesh.to_physical(piece.centroid());
        const Affine au = u.local_affine(x), av = v.local_affine(x);
        total += integrate_abs_affine(piece, Mat((au.gradient - av.gradient) * R), Vec(au.offset - av.offset));
    }
    return total;
}

Mat average_gradient(const PiecewiseField &u) {
    Mat acc = Mat::Zero(u.value_dim(), u.mesh().dim());
    for (const auto &c : u.cells()) acc += c.gradient;
    return acc / static_cast<double>(u.cells().size());
}

double singular_total_variation(const PiecewiseField &u) {
    double total = 0.0;
    for (const auto &f : u.facets()) total += f.jump.norm() * f.area();
    return total;
}

double jump_measure(const std::vector<JumpFacet> &facets, const SurfaceDensity &psi) {
    double total = 0.0;
    for (const auto &f : facets) total += psi(f.jump, f.normal) * f.area();
    return total;
}

double jump_measure(const PiecewiseField &u, const SurfaceDensity &psi) { return jump_measure(u.facets(), psi); }

std::vector<FlatPiece> facet_pieces(const PiecewiseField &u, int facet) {
    const auto &f = u.facets().at(facet);
    const Mat &R = u.mesh().rotation();
    std::vector<PlaneGroup> groups;
    add_grid_planes(groups, u.mesh());
    auto pieces = cut(std::vector<FlatPiece>{map_piece(f.polygon, R.transpose())}, groups);
    for (auto &p : pieces) p = map_piece(p, R);
    return pieces;
}

Mat total_derivative(const PiecewiseField &u) {
    Mat acc = average_gradient(u) * u.mesh().volume();
    for (const auto &f : u.facets()) acc += f.jump * f.normal.transpose() * f.area();
    return acc;
}

namespace {

// Boundary faces of the domain cut along grid and facet planes, each piece
// with its outward normal; coordinates are local.
std::vector<std::pair<FlatPiece, Vec>> boundary_pieces(const PiecewiseField &u) {
    std::vector<PlaneGroup> groups;
    add_grid_planes(groups, u.mesh());
    add_facet_planes(groups, u);
    std::vector<std::pair<FlatPiece, Vec>> out;
    for (const auto &[face, normal] : geometry::box_faces(u.mesh().box()))
        for (auto &p : cut(std::vector<FlatPiece>{face}, groups)) out.emplace_back(std::move(p), normal);
    return out;
}

// Mismatch trace - u_inside as an affine map of local coordinates.
Affine boundary_mismatch(const PiecewiseField &u, const FlatPiece &piece) {
    const GridMesh &mesh = u.mesh();
    const Mat &R = mesh.rotation();
    const Affine inside = u.local_affine(mesh.to_physical(piece.centroid()));
    return {Mat((u.trace()->gradient - inside.gradient) * R), Vec(u.trace()->offset - inside.offset)};
}

}  // namespace

double clamp_energy(const PiecewiseField &u, const SurfaceDensity &psi) {
    if (!u.trace()) return 0.0;
    const Mat &R = u.mesh().rotation();
    double total = 0.0;
    for (const auto &[piece, local_normal] : boundary_pieces(u)) {
        const Affine J = boundary_mismatch(u, piece);
        const Vec normal = R * local_normal;
        auto density = [&](const Vec &y) { return psi(Vec(J.gradient * y + J.offset), normal); };
        // Split where the normal component changes sign; the kinks of
        // normal-jump densities sit there.
        std::vector<FlatPiece> parts{piece};
        const Vec grad = J.gradient.transpose() * normal;
        const double len = grad.norm();
        if (len > 1e-14 * (1.0 + J.gradient.norm())) {
            const auto [below, above] = piece.split(Plane{grad / len, -J.offset.dot(normal) / len});
            parts.clear();
            if (below) parts.push_back(*below);
            if (above) parts.push_back(*above);
        }
        for (const auto &p : parts) total += p.integrate(density);
    }
    return total;
}

Mat clamp_tensor(const PiecewiseField &u) {
    Mat acc = Mat::Zero(u.value_dim(), u.mesh().dim());
    if (!u.trace()) return acc;
    const Mat &R = u.mesh().rotation();
    for (const auto &[piece, local_normal] : boundary_pieces(u)) {
        const Affine J = boundary_mismatch(u, piece);
        const Vec mean = J.gradient * piece.centroid() + J.offset;
        acc += mean * (R * local_normal).transpose() * piece.measure();
    }
    return acc;
}

// ------------------------------------------------------------ constructions

PiecewiseField staircase_sequence(const Mat &A, const Mat &B, const Frame &frame, int n, const GridMesh &domain,
                                  const std::optional<Laminate> &laminate) {
    if (n < 1) throw InvalidArgument("staircase index n must be at least 1, got " + str(n));
    const int dim = domain.dim();
    if (A.cols() != dim || B.cols() != dim || A.rows() != B.rows() || frame.dim != dim)
        throw InvalidArgument("staircase_sequence: dimensions of A, B, frame and domain disagree");
    if (!is_finite(A) || !is_finite(B)) throw InvalidArgument("staircase_sequence: A and B must be finite");
    const Mat M = A - B;
    const auto dec = decompose_by_frame(M, frame);
    const Vec x0 = domain.to_physical(domain.box().lo);
    const auto corners = domain.box().corners();

    Vec base = A * x0 - B * x0;
    std::vector<JumpFacet> facets;
    const double skip_tol = 1e-14 * (1.0 + M.norm());
    for (const auto &t : dec.terms) {
        if (t.amplitude.norm() <= skip_tol) continue;
        double smin = 0.0, smax = 0.0;
        for (const auto &c : corners) {
            const double s = (domain.to_physical(c) - x0).dot(t.normal);
            smin = std::min(smin, s);
            smax = std::max(smax, s);
        }
        const long k0 = static_cast<long>(std::floor(n * smin + 1e-12));
        base += t.amplitude * (static_cast<double>(k0) / n);
        const double origin = x0.dot(t.normal);
        for (long k = k0 + 1; static_cast<double>(k) / n < smax - 1e-12; ++k) {
            if (static_cast<double>(k) / n <= smin + 1e-12) continue;
            facets.push_back(PiecewiseField::plane_facet(domain, t.normal, static_cast<double>(k) / n + origin,
                                                         Vec(t.amplitude / n)));
        }
    }

    if (!laminate || laminate->amplitude.isZero(0.0)) {
        std::vector<Affine> cells(domain.cell_count(), Affine{B, base});
        return PiecewiseField(domain, std::move(cells), std::move(facets), Affine::linear(A));
    }

    // Zigzag of slope +-1 along the laminate axis on a grid of 2n layers.
    const int axis = laminate->axis;
    if (axis < 0 || axis >= dim) throw InvalidArgument("laminate axis out of range");
    if (laminate->amplitude.size() != A.rows()) throw InvalidArgument("laminate amplitude has the wrong size");
    if (domain.is_rotated()) throw InvalidArgument("laminates need an axis-aligned domain");
    std::vector<int> counts = domain.counts();
    counts[axis] = 2 * n;
    for (int a = 0; a < dim; ++a)
        if (a != axis) counts[a] = 1;
    const GridMesh mesh(domain.box(), counts);
    const double lo = mesh.box().lo(axis), h = mesh.cell_size()(axis);
    const Mat shear = laminate->amplitude * unit_vector(dim, axis).transpose();
    std::vector<Affine> cells;
    cells.reserve(mesh.cell_count());
    for (int idx = 0; idx < mesh.cell_count(); ++idx) {
        const int m = mesh.cell_coords(idx)[axis];
        const double sigma = m % 2 == 0 ? 1.0 : -1.0;
        const double shift = -sigma * (lo + m * h) + (m % 2 == 0 ? 0.0 : h);
        cells.push_back({Mat(B + sigma * shear), Vec(base + laminate->amplitude * shift)});
    }
    return PiecewiseField(mesh, std::move(cells), std::move(facets), Affine::linear(A));
}

PiecewiseField staircase_sequence(const Mat &A, const Mat &B, const Frame &frame, int n) {
    return staircase_sequence(A, B, frame, n, GridMesh::unit_cube(static_cast<int>(A.cols())));
}

PiecewiseField jump_competitor(const Vec &lambda, const Vec &nu, const std::vector<JumpSplit> &splits) {
    if (lambda.size() != nu.size()) throw InvalidArgument("jump_competitor: jump and normal dimensions differ");
    if (std::abs(nu.norm() - 1.0) > kOrthoTol) throw InvalidArgument("jump_competitor: normal must have unit length");
    if (splits.empty()) throw InvalidArgument("jump_competitor: at least one split is needed");
    double sum = 0.0;
    for (const auto &s : splits) {
        if (!std::isfinite(s.fraction) || !std::isfinite(s.offset))
            throw InvalidArgument("jump_competitor: split data must be finite");
        if (s.offset <= -0.5 || s.offset >= 0.5) throw InvalidArgument("jump_competitor: split offset outside (-1/2, 1/2)");
        sum += s.fraction;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("jump_competitor: fractions must sum to 1");
    const int dim = static_cast<int>(nu.size());
    const GridMesh mesh = GridMesh::rotated_cube(nu);
    std::vector<JumpFacet> facets;
    for (const auto &s : splits)
        if (s.fraction != 0.0 && !lambda.isZero(0.0))
            facets.push_back(PiecewiseField::plane_facet(mesh, nu, s.offset, Vec(s.fraction * lambda)));
    return PiecewiseField(mesh, {Affine::constant(Vec::Zero(lambda.size()), dim)}, std::move(facets));
}

Vec jump_boundary_datum(const Vec &lambda, const Vec &nu, const Vec &x) {
    if (x.size() != nu.size()) throw InvalidArgument("jump_boundary_datum: point and normal dimensions differ");
    return x.dot(nu) >= 0.0 ? lambda : Vec(Vec::Zero(lambda.size()));
}

std::vector<int> DpoReport::failing_cells() const {
    std::vector<int> out;
    for (const auto &c : cells)
        if (!c.pass) out.push_back(c.cell);
    return out;
}

DpoReport validate_DPO(const StructuredDeformation &sd, double C) {
    if (sd.g.value_dim() != sd.g.mesh().dim())
        throw InvalidArgument("validate_DPO: deformation must map into the same dimension");
    if (!(C > 0.0)) throw InvalidArgument("validate_DPO: C must be positive");
    DpoReport report;
    for (int i = 0; i < sd.g.mesh().cell_count(); ++i) {
        const double dG = sd.G[i].determinant(), dg = sd.grad_g(i).determinant();
        const bool pass = C < dG && dG <= dg;
        report.cells.push_back({i, dG, dg, pass});
        report.all_pass = report.all_pass && pass;
    }
    return report;
}

std::vector<SequenceReport> sequence_report(const StructuredDeformation &sd, const Frame &frame,
                                            const std::vector<int> &n_list, const DensitySet &ds) {
    const auto &cells = sd.g.cells();
    const Mat A = cells.front().gradient;
    const Vec b = cells.front().offset;
    const Mat B = sd.G.front();
    if (!sd.g.facets().empty()) throw InvalidArgument("sequence_report: g must have no jumps");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if ((cells[i].gradient - A).cwiseAbs().maxCoeff() > 1e-12 || (cells[i].offset - b).cwiseAbs().maxCoeff() > 1e-12 ||
            (sd.G[i] - B).cwiseAbs().maxCoeff() > 1e-12)
            throw InvalidArgument("sequence_report: needs g affine and G constant over the domain");
    }
    std::vector<SequenceReport> out;
    for (int n : n_list) {
        const PiecewiseField stair = staircase_sequence(A, B, frame, n, sd.g.mesh());
        // Shift by the constant part of g.
        std::vector<Affine> shifted = stair.cells();
        for (auto &c : shifted) c.offset += b;
        const PiecewiseField u(stair.mesh(), std::move(shifted), stair.facets(), Affine{A, b});
        SequenceReport r;
        r.n = n;
        r.l1_error = l1_distance(u, sd.g);
        double gap = 0.0;
        for (int i = 0; i < static_cast<int>(u.cells().size()); ++i)
            gap = std::max(gap, (u.cells()[i].gradient - sd.G[i]).norm());
        r.avg_gradient_gap = gap;
        r.singular_tv = singular_total_variation(u);
        r.energy = ds.W(B) * u.mesh().volume() + jump_measure(u, ds.psi);
        r.clamp_energy = clamp_energy(u, ds.psi);
        out.push_back(r);
    }
    return out;
}

PiecewiseField restrict_to_half(const PiecewiseField &u, int axis, int split, bool upper) {
    const GridMesh &mesh = u.mesh();
    if (axis < 0 || axis >= mesh.dim()) throw InvalidArgument("restrict_to_half: axis out of range");
    if (split < 1 || split >= mesh.resolution(axis)) throw InvalidArgument("restrict_to_half: split must be interior");
    Box box = mesh.box();
    const double cut_at = box.lo(axis) + split * mesh.cell_size()(axis);
    (upper ? box.lo(axis) : box.hi(axis)) = cut_at;
    std::vector<int> counts = mesh.counts();
    counts[axis] = upper ? counts[axis] - split : split;
    const GridMesh half(box, counts, mesh.rotation());
    std::vector<Affine> cells;
    for (int idx = 0; idx < half.cell_count(); ++idx) {
        auto c = half.cell_coords(idx);
        if (upper) c[axis] += split;
        cells.push_back(u.cells()[mesh.cell_index(c)]);
    }
    std::vector<JumpFacet> facets;
    const Mat &R = mesh.rotation();
    ConvexCell hull = ConvexCell::from_box(box);
    for (const auto &f : u.facets()) {
        if (!hull.section(Plane{Vec(R.transpose() * f.normal), f.offset})) {
            // The plane misses this half; its jump is absorbed into the
            // constant part where the half lies on the + side.
            const Vec probe = half.to_physical(box.center());
            if (probe.dot(f.normal) >= f.offset)
                for (auto &c : cells) c.offset += f.jump;
            continue;
        }
        facets.push_back(PiecewiseField::plane_facet(half, f.normal, f.offset, f.jump));
    }
    return PiecewiseField(half, std::move(cells), std::move(facets), u.trace());
}

PiecewiseField refine(const PiecewiseField &u, int factor) {
    if (factor < 1) throw InvalidArgument("refine: factor must be at least 1");
    const GridMesh &mesh = u.mesh();
    std::vector<int> counts = mesh.counts();
    for (auto &c : counts) c *= factor;
    const GridMesh fine(mesh.box(), counts, mesh.rotation());
    std::vector<Affine> cells;
    cells.reserve(fine.cell_count());
    for (int idx = 0; idx < fine.cell_count(); ++idx) {
        auto c = fine.cell_coords(idx);
        for (auto &k : c) k /= factor;
        cells.push_back(u.cells()[mesh.cell_index(c)]);
    }
    std::vector<JumpFacet> facets;
    for (const auto &f : u.facets()) facets.push_back(PiecewiseField::plane_facet(fine, f.normal, f.offset, f.jump));
    return PiecewiseField(fine, std::move(cells), std::move(facets), u.trace());
}

// ----------------------------------------------------------------- examples

PiecewiseField broken_ramp(int n) {
    return staircase_sequence(Mat::Constant(1, 1, 2.0), Mat::Constant(1, 1, 1.0), Frame::identity(1), n,
                              GridMesh::unit_box(1));
}

PiecewiseField deck_of_cards(int n) {
    Mat A = Mat::Identity(3, 3);
    A(0, 2) = 1.0;
    return staircase_sequence(A, Mat::Identity(3, 3), Frame::identity(3), n, GridMesh::unit_box(3));
}

StructuredDeformation broken_ramp_sd(int resolution) {
    const GridMesh mesh = GridMesh::unit_box(1, resolution);
    return StructuredDeformation(PiecewiseField::affine(mesh, Mat::Constant(1, 1, 2.0)),
                                 std::vector<Mat>(mesh.cell_count(), Mat::Constant(1, 1, 1.0)));
}

StructuredDeformation deck_of_cards_sd(int resolution) {
    const GridMesh mesh = GridMesh::unit_box(3, resolution);
    Mat A = Mat::Identity(3, 3);
    A(0, 2) = 1.0;
    return StructuredDeformation(PiecewiseField::affine(mesh, A),
                                 std::vector<Mat>(mesh.cell_count(), Mat::Identity(3, 3)));
}

}  // namespace sdrelax
