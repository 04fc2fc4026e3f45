#pragma once

#include "sdrelax/core.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace sdrelax::geometry {

inline constexpr double kSplitTol = 1e-12;

struct Box {
    Vec lo;
    Vec hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double volume() const;
    Vec center() const { return 0.5 * (lo + hi); }
    std::vector<Vec> corners() const;
    bool contains(const Vec &x, double tol = 1e-12) const;
};

/// {x : x.normal = offset}; normal is unit length.
struct Plane {
    Vec normal;
    double offset = 0.0;

    double signed_distance(const Vec &x) const { return x.dot(normal) - offset; }
};

/// A flat convex piece of codimension one: a point in 1D, a segment in 2D,
/// a convex polygon (vertex loop) in 3D.
struct FlatPiece {
    int dim = 0;
    std::vector<Vec> vertices;

    double measure() const;
    Vec centroid() const;
    std::pair<double, double> range(const Vec &direction) const;

    /// Returns the parts with signed distance <= 0 and >= 0.
    std::pair<std::optional<FlatPiece>, std::optional<FlatPiece>> split(const Plane &plane) const;

    /// Quadrature over the piece (exact for polynomials of degree <= 5);
    /// in 1D the "integral" is the value at the point.
    template <class F>
    auto integrate(F &&f) const -> decltype(f(Vec()));
};

/// Full-dimensional convex polytope: interval, polygon, or polyhedron stored
/// by its face loops.
class ConvexCell {
public:
    static ConvexCell from_box(const Box &box);

    int dim() const { return dim_; }
    double measure() const;
    Vec centroid() const;
    std::vector<Vec> vertices() const;
    std::pair<double, double> range(const Vec &direction) const;

    std::pair<std::optional<ConvexCell>, std::optional<ConvexCell>> split(const Plane &plane) const;

    /// Intersection with a plane, if it has positive measure and does not
    /// lie on the boundary of the cell.
    std::optional<FlatPiece> section(const Plane &plane) const;

    /// Simplices covering the cell: segments, triangles or tetrahedra, each
    /// given by its dim+1 vertices.
    std::vector<std::vector<Vec>> simplices() const;

    template <class F>
    auto integrate(F &&f) const -> decltype(f(Vec()));

    /// Faces of the box this cell was cut from are not tracked; these are
    /// the current boundary pieces.
    const std::vector<std::vector<Vec>> &faces() const { return faces_; }

private:
    int dim_ = 0;
    // 1D: faces_[0] = {a, b}; 2D: faces_[0] = polygon loop; 3D: face loops.
    std::vector<std::vector<Vec>> faces_;
};

/// Splits every piece by the parallel planes {x.normal = offset} whose
/// offsets fall strictly inside the piece. Offsets must be sorted.
template <class Piece>
std::vector<Piece> slice(const std::vector<Piece> &pieces, const Vec &normal,
                         const std::vector<double> &sorted_offsets);

/// Boundary faces of a box as flat pieces with their outward normals.
std::vector<std::pair<FlatPiece, Vec>> box_faces(const Box &box);

// Quadrature rules on reference simplices, barycentric points + weights
// summing to one.
struct QuadratureRule {
    std::vector<std::vector<double>> barycentric;
    std::vector<double> weights;
};
const QuadratureRule &segment_rule();
const QuadratureRule &triangle_rule();
const QuadratureRule &tetrahedron_rule();

double simplex_measure(const std::vector<Vec> &simplex, int ambient_dim);

template <class F>
auto integrate_simplex(const std::vector<Vec> &simplex, int ambient_dim, F &&f)
    -> decltype(f(Vec())) {
    const int k = static_cast<int>(simplex.size()) - 1;
    const QuadratureRule &rule = k == 1 ? segment_rule() : k == 2 ? triangle_rule() : tetrahedron_rule();
    const double vol = simplex_measure(simplex, ambient_dim);
    using R = decltype(f(Vec()));
    R acc{};
    bool first = true;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        Vec x = Vec::Zero(ambient_dim);
        for (int v = 0; v <= k; ++v) x += rule.barycentric[q][v] * simplex[v];
        R val = f(x) * (rule.weights[q] * vol);
        if (first) {
            acc = val;
            first = false;
        } else {
            acc += val;
        }
    }
    return acc;
}

template <class F>
auto FlatPiece::integrate(F &&f) const -> decltype(f(Vec())) {
    using R = decltype(f(Vec()));
    if (dim == 1) return f(vertices.front());
    if (dim == 2) return integrate_simplex(vertices, 2, f);
    const Vec c = centroid();
    R acc{};
    bool first = true;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        std::vector<Vec> tri{c, vertices[i], vertices[(i + 1) % vertices.size()]};
        if (simplex_measure(tri, 3) <= 0.0) continue;
        R val = integrate_simplex(tri, 3, f);
        if (first) {
            acc = val;
            first = false;
        } else {
            acc += val;
        }
    }
    if (first) return f(c) * 0.0;
    return acc;
}

template <class F>
auto ConvexCell::integrate(F &&f) const -> decltype(f(Vec())) {
    using R = decltype(f(Vec()));
    R acc{};
    bool first = true;
    for (const auto &s : simplices()) {
        R val = integrate_simplex(s, dim_, f);
        if (first) {
            acc = val;
            first = false;
        } else {
            acc += val;
        }
    }
    if (first) return f(centroid()) * 0.0;
    return acc;
}

}  // namespace sdrelax::geometry
