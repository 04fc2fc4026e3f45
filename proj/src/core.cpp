#include "sdrelax/core.hpp"
#include "sdrelax/densities.hpp"

#include <algorithm>
#include <cmath>

namespace sdrelax {

void require_dim(int dim) {
    if (dim < 1 || dim > 3)
        throw InvalidArgument("dimension must be 1, 2 or 3, got " + std::to_string(dim));
}

bool is_finite(const Mat &m) { return m.allFinite(); }
bool is_finite(const Vec &v) { return v.allFinite(); }

Mat identity(int dim) {
    require_dim(dim);
    return Mat::Identity(dim, dim);
}

Vec unit_vector(int dim, int axis) {
    require_dim(dim);
    Vec e = Vec::Zero(dim);
    e(axis) = 1.0;
    return e;
}

Mat disarrangement_tensor(const Mat &grad_g, const Mat &G) {
    if (grad_g.rows() != G.rows() || grad_g.cols() != G.cols())
        throw InvalidArgument("disarrangement_tensor: shape mismatch between grad g and G");
    return grad_g - G;
}

Frame::Frame(int dim_, std::vector<double> angles_) : dim(dim_), angles(std::move(angles_)) {
    require_dim(dim);
    if (static_cast<int>(angles.size()) != angle_count(dim))
        throw InvalidArgument("frame in dimension " + std::to_string(dim) + " needs " +
                              std::to_string(angle_count(dim)) + " angles");
}

Frame Frame::identity(int dim) { return Frame(dim, std::vector<double>(angle_count(dim), 0.0)); }

int Frame::angle_count(int dim) {
    switch (dim) {
    case 1: return 0;
    case 2: return 1;
    case 3: return 3;
    default: throw InvalidArgument("unsupported frame dimension");
    }
}

namespace {

Mat givens(int dim, int i, int j, double theta) {
    Mat G = Mat::Identity(dim, dim);
    const double c = std::cos(theta), s = std::sin(theta);
    G(i, i) = c;
    G(j, j) = c;
    G(i, j) = -s;
    G(j, i) = s;
    return G;
}

}  // namespace

Mat frame_matrix(const Frame &frame) {
    require_dim(frame.dim);
    if (static_cast<int>(frame.angles.size()) != Frame::angle_count(frame.dim))
        throw InvalidArgument("frame_matrix: angle count does not match dimension");
    switch (frame.dim) {
    case 1: return Mat::Identity(1, 1);
    case 2: return givens(2, 0, 1, frame.angles[0]);
    default:
        return givens(3, 0, 1, frame.angles[0]) * givens(3, 0, 2, frame.angles[1]) *
               givens(3, 1, 2, frame.angles[2]);
    }
}

Mat rotation_with_last_column(const Vec &nu) {
    const int dim = static_cast<int>(nu.size());
    require_dim(dim);
    if (std::abs(nu.norm() - 1.0) > kOrthoTol)
        throw InvalidArgument("rotation_with_last_column: normal must have unit length");
    Mat R = Mat::Zero(dim, dim);
    R.col(dim - 1) = nu;
    if (dim == 1) return R;
    // Gram-Schmidt against the coordinate axes least aligned with nu.
    int filled = 0;
    std::vector<int> order(dim);
    for (int k = 0; k < dim; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(nu(a)) < std::abs(nu(b)); });
    for (int k : order) {
        if (filled == dim - 1) break;
        Vec v = unit_vector(dim, k);
        v -= v.dot(nu) * nu;
        for (int m = 0; m < filled; ++m) v -= v.dot(R.col(m)) * R.col(m);
        const double len = v.norm();
        if (len < 1e-8) continue;
        R.col(filled++) = v / len;
    }
    if (R.determinant() < 0.0) R.col(0) = -R.col(0);
    return R;
}

Mat RankOneDecomposition::reconstruct() const {
    if (terms.empty()) throw InvalidArgument("empty decomposition");
    Mat M = Mat::Zero(terms.front().amplitude.size(), terms.front().normal.size());
    for (const auto &t : terms) M += t.amplitude * t.normal.transpose();
    return M;
}

RankOneDecomposition decompose_by_frame(const Mat &M, const Frame &frame) {
    if (M.cols() != frame.dim)
        throw InvalidArgument("decompose_by_frame: matrix columns do not match frame dimension");
    const Mat R = frame_matrix(frame);
    RankOneDecomposition dec;
    dec.terms.reserve(frame.dim);
    for (int i = 0; i < frame.dim; ++i) {
        Vec nu = R.col(i);
        dec.terms.push_back({Vec(M * nu), nu});
    }
    return dec;
}

double frame_cost(const Mat &M, const Frame &frame, const SurfaceDensity &psi) {
    double cost = 0.0;
    for (const auto &t : decompose_by_frame(M, frame).terms) cost += psi(t.amplitude, t.normal);
    return cost;
}

double trace_difference(const Mat &A, const Mat &B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw InvalidArgument("trace of A - B: shape mismatch");
    if (A.rows() != A.cols()) throw InvalidArgument("trace of A - B: matrices must be square");
    return (A - B).trace();
}

double exact_H_abs(const Mat &A, const Mat &B) { return std::abs(trace_difference(A, B)); }
double exact_H_plus(const Mat &A, const Mat &B) { return positive_part(trace_difference(A, B)); }
double exact_H_minus(const Mat &A, const Mat &B) { return negative_part(trace_difference(A, B)); }

namespace {

double normal_jump(const Vec &lambda, const Vec &nu) {
    if (lambda.size() != nu.size()) throw InvalidArgument("jump and normal dimensions differ");
    if (std::abs(nu.norm() - 1.0) > kOrthoTol) throw InvalidArgument("normal must have unit length");
    return lambda.dot(nu);
}

}  // namespace

double exact_h_abs(const Vec &lambda, const Vec &nu) { return std::abs(normal_jump(lambda, nu)); }
double exact_h_plus(const Vec &lambda, const Vec &nu) { return positive_part(normal_jump(lambda, nu)); }
double exact_h_minus(const Vec &lambda, const Vec &nu) { return negative_part(normal_jump(lambda, nu)); }

}  // namespace sdrelax
