#pragma once

#include "sdrelax/core.hpp"
#include "sdrelax/densities.hpp"
#include "sdrelax/geometry.hpp"

#include <optional>
#include <vector>

namespace sdrelax {

/// Uniform grid on an axis-aligned box, optionally rotated: physical points
/// are x = rotation * y for y in the box. The rotated case realizes the
/// cube Q_nu whose last pair of faces is perpendicular to nu.
class GridMesh {
public:
    GridMesh() = default;
    GridMesh(geometry::Box box, int resolution, std::optional<Mat> rotation = std::nullopt);
    GridMesh(geometry::Box box, std::vector<int> counts, std::optional<Mat> rotation = std::nullopt);

    /// (-1/2, 1/2)^N
    static GridMesh unit_cube(int dim, int resolution = 1);
    /// (0, 1)^N
    static GridMesh unit_box(int dim, int resolution = 1);
    /// Unit cube rotated so that two faces are perpendicular to nu.
    static GridMesh rotated_cube(const Vec &nu, int resolution = 1);

    int dim() const { return box_.dim(); }
    /// Cells along each axis; resolution() is the count along axis 0.
    int resolution() const { return counts_.front(); }
    int resolution(int axis) const { return counts_[axis]; }
    const std::vector<int> &counts() const { return counts_; }
    bool is_uniform() const;
    int cell_count() const;
    const geometry::Box &box() const { return box_; }
    const Mat &rotation() const { return rotation_; }
    bool is_rotated() const { return rotated_; }
    double volume() const { return box_.volume(); }
    Vec cell_size() const;

    Vec to_local(const Vec &x) const;
    Vec to_physical(const Vec &y) const;

    std::vector<int> cell_coords(int index) const;
    int cell_index(const std::vector<int> &coords) const;
    geometry::Box cell_box(int index) const;  // local coordinates

    /// Cell containing x; points on shared faces go to the higher cell,
    /// points on the outer boundary to the adjacent cell.
    int locate(const Vec &x) const;
    bool contains(const Vec &x, double tol = 1e-12) const;

    /// Interior grid coordinates along a local axis.
    std::vector<double> grid_lines(int axis) const;

    bool same_domain(const GridMesh &other, double tol = 1e-12) const;
    bool same_mesh(const GridMesh &other, double tol = 1e-12) const;

private:
    geometry::Box box_;
    std::vector<int> counts_{1};
    Mat rotation_;
    bool rotated_ = false;
};

struct Affine {
    Mat gradient;
    Vec offset;

    Vec operator()(const Vec &x) const { return gradient * x + offset; }
    static Affine constant(const Vec &value, int dim);
    static Affine linear(const Mat &A);
};

/// Planar jump facet spanning the whole domain: the field gains `jump` on
/// the side {x.normal >= offset}. `polygon` is the cross-section of the
/// domain by the plane, in physical coordinates.
struct JumpFacet {
    Vec normal;
    double offset = 0.0;
    geometry::FlatPiece polygon;
    Vec jump;

    double area() const { return polygon.measure(); }
    geometry::Plane plane() const { return {normal, offset}; }
};

/// SBV deformation made of a continuous per-cell affine part plus a finite
/// superposition of planar jumps. There is no Cantor part by construction.
/// An optional affine boundary trace records the datum imposed on the
/// domain boundary; the mismatch between it and the interior trace is the
/// boundary clamp.
class PiecewiseField {
public:
    PiecewiseField(GridMesh mesh, std::vector<Affine> cells, std::vector<JumpFacet> facets = {},
                   std::optional<Affine> trace = std::nullopt);

    static PiecewiseField affine(const GridMesh &mesh, const Mat &A, const Vec &b);
    static PiecewiseField affine(const GridMesh &mesh, const Mat &A);

    /// Facet on the plane {x.normal = offset} clipped to the mesh domain.
    static JumpFacet plane_facet(const GridMesh &mesh, const Vec &normal, double offset, const Vec &jump);

    const GridMesh &mesh() const { return mesh_; }
    const std::vector<Affine> &cells() const { return cells_; }
    const std::vector<JumpFacet> &facets() const { return facets_; }
    const std::optional<Affine> &trace() const { return trace_; }
    int value_dim() const { return value_dim_; }

    Vec evaluate(const Vec &x) const;
    /// Affine map valid on the open region of x that no facet crosses.
    Affine local_affine(const Vec &x) const;
    /// Sum of jumps of all facets except `skip` active at x.
    Vec jumps_at(const Vec &x, int skip = -1) const;

private:
    void validate();

    GridMesh mesh_;
    std::vector<Affine> cells_;
    std::vector<JumpFacet> facets_;
    std::optional<Affine> trace_;
    int value_dim_ = 0;
};

struct StructuredDeformation {
    PiecewiseField g;
    std::vector<Mat> G;  // one per cell of g's mesh

    StructuredDeformation(PiecewiseField g, std::vector<Mat> G);
    Mat grad_g(int cell) const { return g.cells()[cell].gradient; }
    Mat disarrangement(int cell) const;
};

double l1_distance(const PiecewiseField &u, const PiecewiseField &v);
Mat average_gradient(const PiecewiseField &u);
double singular_total_variation(const PiecewiseField &u);
double jump_measure(const PiecewiseField &u, const SurfaceDensity &psi);
double jump_measure(const std::vector<JumpFacet> &facets, const SurfaceDensity &psi);

/// Pieces of facet `facet` of u cut by the grid planes of u's mesh,
/// in physical coordinates.
std::vector<geometry::FlatPiece> facet_pieces(const PiecewiseField &u, int facet);

/// int grad u dx + sum over facets of jump (x) normal * area.
Mat total_derivative(const PiecewiseField &u);

/// Surface energy of the boundary clamp: integral over the domain boundary
/// of Psi(trace - u_inside, outward normal). Zero if no trace is set.
double clamp_energy(const PiecewiseField &u, const SurfaceDensity &psi);
/// Integral over the boundary of (trace - u_inside) (x) outward normal.
Mat clamp_tensor(const PiecewiseField &u);

/// Optional laminate of gradients B +- a (x) e_axis in alternating grid layers.
struct Laminate {
    int axis = 0;
    Vec amplitude;
};

/// Staircase approximant of the affine target x -> A x with gradient B:
/// jumps (M nu_i)/n across the planes {(x - x0).nu_i = k/n}, M = A - B,
/// x0 the low corner of the domain, boundary trace A x.
PiecewiseField staircase_sequence(const Mat &A, const Mat &B, const Frame &frame, int n,
                                  const GridMesh &domain, const std::optional<Laminate> &laminate = std::nullopt);
PiecewiseField staircase_sequence(const Mat &A, const Mat &B, const Frame &frame, int n);

struct JumpSplit {
    double fraction;
    double offset;  // position along nu, in (-1/2, 1/2)
};

/// Piecewise-constant competitor on Q_nu: 0 below, lambda above, reached
/// through parallel jumps fraction * lambda.
PiecewiseField jump_competitor(const Vec &lambda, const Vec &nu, const std::vector<JumpSplit> &splits);

/// u_{lambda,nu}: 0 for x.nu < 0, lambda for x.nu >= 0.
Vec jump_boundary_datum(const Vec &lambda, const Vec &nu, const Vec &x);

struct DpoCellCheck {
    int cell;
    double det_G;
    double det_grad_g;
    bool pass;
};

struct DpoReport {
    std::vector<DpoCellCheck> cells;
    bool all_pass = true;
    std::vector<int> failing_cells() const;
};

/// Checks C < det G <= det grad g cell by cell.
DpoReport validate_DPO(const StructuredDeformation &sd, double C);

struct SequenceReport {
    int n = 0;
    double l1_error = 0.0;
    double avg_gradient_gap = 0.0;
    double singular_tv = 0.0;
    double energy = 0.0;
    double clamp_energy = 0.0;
};

/// Builds the staircase approximants of a homogeneous structured deformation
/// (g affine, G constant) and measures their convergence. The gradient gap
/// is the largest deviation of cell-averaged gradients from G over the
/// cells of sd's mesh.
std::vector<SequenceReport> sequence_report(const StructuredDeformation &sd, const Frame &frame,
                                            const std::vector<int> &n_list, const DensitySet &ds);

/// Restriction of a field to the cells with index coordinate along `axis`
/// below (`upper` false) or at/above (`upper` true) `split`.
PiecewiseField restrict_to_half(const PiecewiseField &u, int axis, int split, bool upper);

/// Same field on a mesh refined by an integer factor.
PiecewiseField refine(const PiecewiseField &u, int factor);

// The broken ramp g = 2x, G = 1 on (0,1) and the shear
// g = (x1 + x3, x2, x3), G = I on (0,1)^3, with their staircase approximants.
PiecewiseField broken_ramp(int n);
PiecewiseField deck_of_cards(int n);
StructuredDeformation broken_ramp_sd(int resolution = 1);
StructuredDeformation deck_of_cards_sd(int resolution = 1);

}  // namespace sdrelax
