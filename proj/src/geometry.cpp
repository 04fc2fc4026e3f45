#include "sdrelax/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace sdrelax::geometry {

double Box::volume() const { return (hi - lo).prod(); }

std::vector<Vec> Box::corners() const {
    const int n = dim();
    std::vector<Vec> out;
    for (int mask = 0; mask < (1 << n); ++mask) {
        Vec c(n);
        for (int j = 0; j < n; ++j) c(j) = (mask >> j) & 1 ? hi(j) : lo(j);
        out.push_back(c);
    }
    return out;
}

bool Box::contains(const Vec &x, double tol) const {
    for (int j = 0; j < dim(); ++j)
        if (x(j) < lo(j) - tol || x(j) > hi(j) + tol) return false;
    return true;
}

namespace {

Vec cross3(const Vec &a, const Vec &b) {
    Vec c(3);
    c << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
    return c;
}

Vec vertex_mean(const std::vector<Vec> &pts) {
    Vec c = Vec::Zero(pts.front().size());
    for (const auto &p : pts) c += p;
    return c / static_cast<double>(pts.size());
}

double loop_area(const std::vector<Vec> &loop) {
    if (loop.size() < 3) return 0.0;
    const Vec c = vertex_mean(loop);
    double area = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec a = loop[i] - c, b = loop[(i + 1) % loop.size()] - c;
        if (a.size() == 2)
            area += 0.5 * (a(0) * b(1) - a(1) * b(0));
        else
            area += 0.5 * cross3(a, b).norm();
    }
    return std::abs(area);
}

// Sutherland-Hodgman on a closed loop. keep_below selects d <= 0.
std::vector<Vec> clip_loop(const std::vector<Vec> &loop, const std::vector<double> &d, bool keep_below) {
    std::vector<Vec> out;
    const std::size_t n = loop.size();
    auto inside = [&](double v) { return keep_below ? v <= kSplitTol : v >= -kSplitTol; };
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const bool in_i = inside(d[i]), in_j = inside(d[j]);
        if (in_i) out.push_back(loop[i]);
        const bool strict_cross = (d[i] < -kSplitTol && d[j] > kSplitTol) || (d[i] > kSplitTol && d[j] < -kSplitTol);
        if (in_i != in_j && strict_cross) {
            const double t = d[i] / (d[i] - d[j]);
            out.push_back(loop[i] + t * (loop[j] - loop[i]));
        }
    }
    return out;
}

void dedup(std::vector<Vec> &pts, double tol = 1e-12) {
    std::vector<Vec> out;
    for (const auto &p : pts) {
        bool dup = false;
        for (const auto &q : out)
            if ((p - q).norm() <= tol) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(p);
    }
    pts = std::move(out);
}

void dedup_loop(std::vector<Vec> &loop, double tol = 1e-12) {
    std::vector<Vec> out;
    for (const auto &p : loop)
        if (out.empty() || (p - out.back()).norm() > tol) out.push_back(p);
    while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) out.pop_back();
    loop = std::move(out);
}

// Orders coplanar points of a convex set into a loop around their mean.
std::vector<Vec> order_in_plane(std::vector<Vec> pts, const Vec &normal) {
    dedup(pts);
    if (pts.size() < 3) return pts;
    const Vec c = vertex_mean(pts);
    Vec u = Vec::Zero(3);
    const int k = std::abs(normal(0)) < 0.9 ? 0 : 1;
    u(k) = 1.0;
    u -= u.dot(normal) * normal;
    u.normalize();
    const Vec w = cross3(normal, u);
    std::sort(pts.begin(), pts.end(), [&](const Vec &a, const Vec &b) {
        return std::atan2((a - c).dot(w), (a - c).dot(u)) < std::atan2((b - c).dot(w), (b - c).dot(u));
    });
    return pts;
}

std::vector<double> distances(const std::vector<Vec> &pts, const Plane &plane) {
    std::vector<double> d;
    d.reserve(pts.size());
    for (const auto &p : pts) d.push_back(plane.signed_distance(p));
    return d;
}

}  // namespace

double FlatPiece::measure() const {
    switch (dim) {
    case 1: return 1.0;
    case 2: return (vertices[1] - vertices[0]).norm();
    default: return loop_area(vertices);
    }
}

Vec FlatPiece::centroid() const {
    if (dim <= 2) return vertex_mean(vertices);
    const Vec c = vertex_mean(vertices);
    Vec acc = Vec::Zero(3);
    double total = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Vec &a = vertices[i], &b = vertices[(i + 1) % vertices.size()];
        const double area = 0.5 * cross3(a - c, b - c).norm();
        acc += area * (c + a + b) / 3.0;
        total += area;
    }
    return total > 0.0 ? Vec(acc / total) : c;
}

std::pair<double, double> FlatPiece::range(const Vec &direction) const {
    double lo = vertices.front().dot(direction), hi = lo;
    for (const auto &v : vertices) {
        lo = std::min(lo, v.dot(direction));
        hi = std::max(hi, v.dot(direction));
    }
    return {lo, hi};
}

std::pair<std::optional<FlatPiece>, std::optional<FlatPiece>> FlatPiece::split(const Plane &plane) const {
    const auto d = distances(vertices, plane);
    const double dmin = *std::min_element(d.begin(), d.end());
    const double dmax = *std::max_element(d.begin(), d.end());
    if (dim == 1) {
        if (d[0] <= 0.0) return {*this, std::nullopt};
        return {std::nullopt, *this};
    }
    if (dmax <= kSplitTol) return {*this, std::nullopt};
    if (dmin >= -kSplitTol) return {std::nullopt, *this};
    if (dim == 2) {
        const double t = d[0] / (d[0] - d[1]);
        const Vec m = vertices[0] + t * (vertices[1] - vertices[0]);
        FlatPiece first{2, {vertices[0], m}}, second{2, {m, vertices[1]}};
        if (d[0] < 0.0) return {first, second};
        return {second, first};
    }
    FlatPiece below{3, clip_loop(vertices, d, true)}, above{3, clip_loop(vertices, d, false)};
    dedup_loop(below.vertices);
    dedup_loop(above.vertices);
    std::optional<FlatPiece> b, a;
    if (below.vertices.size() >= 3 && below.measure() > 0.0) b = below;
    if (above.vertices.size() >= 3 && above.measure() > 0.0) a = above;
    return {b, a};
}

ConvexCell ConvexCell::from_box(const Box &box) {
    ConvexCell cell;
    cell.dim_ = box.dim();
    const Vec &lo = box.lo, &hi = box.hi;
    if (cell.dim_ == 1) {
        cell.faces_ = {{lo, hi}};
    } else if (cell.dim_ == 2) {
        Vec a(2), b(2), c(2), d(2);
        a << lo(0), lo(1);
        b << hi(0), lo(1);
        c << hi(0), hi(1);
        d << lo(0), hi(1);
        cell.faces_ = {{a, b, c, d}};
    } else {
        auto P = [&](int i, int j, int k) {
            Vec p(3);
            p << (i ? hi(0) : lo(0)), (j ? hi(1) : lo(1)), (k ? hi(2) : lo(2));
            return p;
        };
        cell.faces_ = {
            {P(0, 0, 0), P(0, 1, 0), P(0, 1, 1), P(0, 0, 1)}, {P(1, 0, 0), P(1, 1, 0), P(1, 1, 1), P(1, 0, 1)},
            {P(0, 0, 0), P(1, 0, 0), P(1, 0, 1), P(0, 0, 1)}, {P(0, 1, 0), P(1, 1, 0), P(1, 1, 1), P(0, 1, 1)},
            {P(0, 0, 0), P(1, 0, 0), P(1, 1, 0), P(0, 1, 0)}, {P(0, 0, 1), P(1, 0, 1), P(1, 1, 1), P(0, 1, 1)},
        };
    }
    return cell;
}

std::vector<Vec> ConvexCell::vertices() const {
    std::vector<Vec> pts;
    for (const auto &f : faces_) pts.insert(pts.end(), f.begin(), f.end());
    dedup(pts);
    return pts;
}

std::pair<double, double> ConvexCell::range(const Vec &direction) const {
    double lo = faces_.front().front().dot(direction), hi = lo;
    for (const auto &f : faces_)
        for (const auto &v : f) {
            const double s = v.dot(direction);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    return {lo, hi};
}

std::vector<std::vector<Vec>> ConvexCell::simplices() const {
    std::vector<std::vector<Vec>> out;
    if (dim_ == 1) {
        out.push_back(faces_[0]);
        return out;
    }
    if (dim_ == 2) {
        const auto &loop = faces_[0];
        const Vec c = vertex_mean(loop);
        for (std::size_t i = 0; i < loop.size(); ++i) {
            std::vector<Vec> tri{c, loop[i], loop[(i + 1) % loop.size()]};
            if (simplex_measure(tri, 2) > 0.0) out.push_back(std::move(tri));
        }
        return out;
    }
    const Vec c = vertex_mean(vertices());
    for (const auto &f : faces_) {
        const Vec fc = vertex_mean(f);
        for (std::size_t i = 0; i < f.size(); ++i) {
            std::vector<Vec> tet{c, fc, f[i], f[(i + 1) % f.size()]};
            if (simplex_measure(tet, 3) > 0.0) out.push_back(std::move(tet));
        }
    }
    return out;
}

double ConvexCell::measure() const {
    double m = 0.0;
    for (const auto &s : simplices()) m += simplex_measure(s, dim_);
    return m;
}

Vec ConvexCell::centroid() const {
    Vec acc = Vec::Zero(dim_);
    double total = 0.0;
    for (const auto &s : simplices()) {
        const double m = simplex_measure(s, dim_);
        acc += m * vertex_mean(s);
        total += m;
    }
    return total > 0.0 ? Vec(acc / total) : vertex_mean(vertices());
}

std::pair<std::optional<ConvexCell>, std::optional<ConvexCell>> ConvexCell::split(const Plane &plane) const {
    const auto [smin, smax] = range(plane.normal);
    if (smax - plane.offset <= kSplitTol) return {*this, std::nullopt};
    if (smin - plane.offset >= -kSplitTol) return {std::nullopt, *this};

    ConvexCell below, above;
    below.dim_ = above.dim_ = dim_;
    if (dim_ == 1) {
        const Vec &a = faces_[0][0], &b = faces_[0][1];
        const double da = plane.signed_distance(a), db = plane.signed_distance(b);
        const Vec m = a + (da / (da - db)) * (b - a);
        if (da < 0.0) {
            below.faces_ = {{a, m}};
            above.faces_ = {{m, b}};
        } else {
            below.faces_ = {{m, b}};
            above.faces_ = {{a, m}};
        }
        return {below, above};
    }
    if (dim_ == 2) {
        const auto d = distances(faces_[0], plane);
        auto lb = clip_loop(faces_[0], d, true), la = clip_loop(faces_[0], d, false);
        dedup_loop(lb);
        dedup_loop(la);
        below.faces_ = {lb};
        above.faces_ = {la};
        std::optional<ConvexCell> ob, oa;
        if (lb.size() >= 3 && loop_area(lb) > 0.0) ob = below;
        if (la.size() >= 3 && loop_area(la) > 0.0) oa = above;
        return {ob, oa};
    }
    std::vector<Vec> cap;
    for (const auto &f : faces_) {
        const auto d = distances(f, plane);
        auto lb = clip_loop(f, d, true), la = clip_loop(f, d, false);
        dedup_loop(lb);
        dedup_loop(la);
        if (lb.size() >= 3 && loop_area(lb) > 0.0) below.faces_.push_back(lb);
        if (la.size() >= 3 && loop_area(la) > 0.0) above.faces_.push_back(la);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const std::size_t j = (i + 1) % f.size();
            if (std::abs(d[i]) <= kSplitTol) cap.push_back(f[i]);
            if ((d[i] < -kSplitTol && d[j] > kSplitTol) || (d[i] > kSplitTol && d[j] < -kSplitTol))
                cap.push_back(f[i] + (d[i] / (d[i] - d[j])) * (f[j] - f[i]));
        }
    }
    cap = order_in_plane(cap, plane.normal);
    if (cap.size() >= 3) {
        below.faces_.push_back(cap);
        above.faces_.push_back(cap);
    }
    std::optional<ConvexCell> ob, oa;
    if (below.faces_.size() >= 4) ob = below;
    if (above.faces_.size() >= 4) oa = above;
    return {ob, oa};
}

std::optional<FlatPiece> ConvexCell::section(const Plane &plane) const {
    const auto [smin, smax] = range(plane.normal);
    if (smax - plane.offset <= kSplitTol || smin - plane.offset >= -kSplitTol) return std::nullopt;
    std::vector<Vec> pts;
    for (const auto &f : faces_) {
        const auto d = distances(f, plane);
        const std::size_t n = f.size();
        const std::size_t edges = dim_ == 1 ? 1 : n;
        for (std::size_t i = 0; i < edges; ++i) {
            const std::size_t j = (i + 1) % n;
            if (std::abs(d[i]) <= kSplitTol) pts.push_back(f[i]);
            if ((d[i] < -kSplitTol && d[j] > kSplitTol) || (d[i] > kSplitTol && d[j] < -kSplitTol))
                pts.push_back(f[i] + (d[i] / (d[i] - d[j])) * (f[j] - f[i]));
        }
    }
    dedup(pts);
    FlatPiece piece;
    piece.dim = dim_;
    if (dim_ == 1) {
        if (pts.empty()) return std::nullopt;
        piece.vertices = {pts.front()};
        return piece;
    }
    if (dim_ == 2) {
        if (pts.size() < 2) return std::nullopt;
        // Extreme points along the tangent.
        Vec t(2);
        t << -plane.normal(1), plane.normal(0);
        auto [mn, mx] = std::minmax_element(pts.begin(), pts.end(),
                                            [&](const Vec &a, const Vec &b) { return a.dot(t) < b.dot(t); });
        piece.vertices = {*mn, *mx};
        if (piece.measure() <= 0.0) return std::nullopt;
        return piece;
    }
    piece.vertices = order_in_plane(pts, plane.normal);
    if (piece.vertices.size() < 3 || piece.measure() <= 0.0) return std::nullopt;
    return piece;
}

template <class Piece>
std::vector<Piece> slice(const std::vector<Piece> &pieces, const Vec &normal, const std::vector<double> &sorted_offsets) {
    std::vector<Piece> out;
    out.reserve(pieces.size());
    for (const auto &piece : pieces) {
        const auto [lo, hi] = piece.range(normal);
        auto it = std::upper_bound(sorted_offsets.begin(), sorted_offsets.end(), lo + kSplitTol);
        std::optional<Piece> rest = piece;
        for (; it != sorted_offsets.end() && *it < hi - kSplitTol && rest; ++it) {
            auto [below, above] = rest->split(Plane{normal, *it});
            if (below) out.push_back(std::move(*below));
            rest = std::move(above);
        }
        if (rest) out.push_back(std::move(*rest));
    }
    return out;
}

template std::vector<FlatPiece> slice(const std::vector<FlatPiece> &, const Vec &, const std::vector<double> &);
template std::vector<ConvexCell> slice(const std::vector<ConvexCell> &, const Vec &, const std::vector<double> &);

std::vector<std::pair<FlatPiece, Vec>> box_faces(const Box &box) {
    const int n = box.dim();
    std::vector<std::pair<FlatPiece, Vec>> out;
    for (int j = 0; j < n; ++j) {
        for (int side = 0; side < 2; ++side) {
            const double coord = side ? box.hi(j) : box.lo(j);
            Vec normal = Vec::Zero(n);
            normal(j) = side ? 1.0 : -1.0;
            FlatPiece face;
            face.dim = n;
            if (n == 1) {
                Vec p(1);
                p << coord;
                face.vertices = {p};
            } else if (n == 2) {
                const int k = 1 - j;
                Vec a(2), b(2);
                a(j) = coord;
                b(j) = coord;
                a(k) = box.lo(k);
                b(k) = box.hi(k);
                face.vertices = {a, b};
            } else {
                const int k = (j + 1) % 3, l = (j + 2) % 3;
                auto P = [&](double uk, double ul) {
                    Vec p(3);
                    p(j) = coord;
                    p(k) = uk;
                    p(l) = ul;
                    return p;
                };
                face.vertices = {P(box.lo(k), box.lo(l)), P(box.hi(k), box.lo(l)), P(box.hi(k), box.hi(l)),
                                 P(box.lo(k), box.hi(l))};
            }
            out.emplace_back(std::move(face), normal);
        }
    }
    return out;
}

double simplex_measure(const std::vector<Vec> &s, int ambient_dim) {
    const int k = static_cast<int>(s.size()) - 1;
    if (k == 1) return (s[1] - s[0]).norm();
    if (k == 2) {
        const Vec a = s[1] - s[0], b = s[2] - s[0];
        if (ambient_dim == 2) return 0.5 * std::abs(a(0) * b(1) - a(1) * b(0));
        return 0.5 * cross3(a, b).norm();
    }
    Eigen::Matrix3d J;
    J.col(0) = s[1] - s[0];
    J.col(1) = s[2] - s[0];
    J.col(2) = s[3] - s[0];
    return std::abs(J.determinant()) / 6.0;
}

const QuadratureRule &segment_rule() {
    static const QuadratureRule rule = [] {
        QuadratureRule r;
        const double x[2] = {0.3399810435848563, 0.8611363115940526};
        const double w[2] = {0.6521451548625461, 0.3478548451374538};
        for (int i = 0; i < 2; ++i)
            for (int s = -1; s <= 1; s += 2) {
                const double t = 0.5 * (1.0 + s * x[i]);
                r.barycentric.push_back({1.0 - t, t});
                r.weights.push_back(0.5 * w[i]);
            }
        return r;
    }();
    return rule;
}

const QuadratureRule &triangle_rule() {
    static const QuadratureRule rule = [] {
        QuadratureRule r;
        r.barycentric.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
        r.weights.push_back(0.225);
        const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
        const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
        for (auto [a, b, w] : {std::tuple{a1, b1, w1}, std::tuple{a2, b2, w2}}) {
            r.barycentric.push_back({a, b, b});
            r.barycentric.push_back({b, a, b});
            r.barycentric.push_back({b, b, a});
            for (int i = 0; i < 3; ++i) r.weights.push_back(w);
        }
        return r;
    }();
    return rule;
}

const QuadratureRule &tetrahedron_rule() {
    static const QuadratureRule rule = [] {
        QuadratureRule r;
        r.barycentric.push_back({0.25, 0.25, 0.25, 0.25});
        r.weights.push_back(-0.8);
        for (int i = 0; i < 4; ++i) {
            std::vector<double> b(4, 1.0 / 6);
            b[i] = 0.5;
            r.barycentric.push_back(b);
            r.weights.push_back(0.45);
        }
        return r;
    }();
    return rule;
}

}  // namespace sdrelax::geometry
