#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdrelax {

struct SurfaceDensity;


// Small dense algebra. Every object lives in dimension 1, 2 or 3, so the
// storage is fixed-capacity and never touches the heap.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs with inconsistent dimensions or out-of-range parameters.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical certificate failed (sandwich violated, non-finite energy, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

inline constexpr double kOrthoTol = 1e-12;
inline constexpr double kReconstructionTol = 1e-10;

void require_dim(int dim);
bool is_finite(const Mat &m);
bool is_finite(const Vec &v);
Mat identity(int dim);
Vec unit_vector(int dim, int axis);

/// M = grad g - G, the disarrangement tensor.
Mat disarrangement_tensor(const Mat &grad_g, const Mat &G);

/// Orthonormal frame parametrized by Givens angles: none in 1D, one in 2D,
/// three in 3D. The induced matrix is always a proper rotation.
struct Frame {
    int dim = 1;
    std::vector<double> angles;

    Frame() = default;
    Frame(int dim, std::vector<double> angles);

    static Frame identity(int dim);
    static int angle_count(int dim);
};

/// R = G01(a0) in 2D; R = G01(a0) G02(a1) G12(a2) in 3D.
Mat frame_matrix(const Frame &frame);

/// A rotation whose last column is nu, so that the last two faces of the
/// rotated unit cube are perpendicular to nu.
Mat rotation_with_last_column(const Vec &nu);

struct RankOneTerm {
    Vec amplitude;  // a_i = M nu_i
    Vec normal;     // nu_i, column i of the frame matrix
};

struct RankOneDecomposition {
    std::vector<RankOneTerm> terms;

    Mat reconstruct() const;
};

RankOneDecomposition decompose_by_frame(const Mat &M, const Frame &frame);

/// Sum over the frame of Psi(M nu_i, nu_i): the limiting interfacial cost of
/// the staircase competitor built on that frame.
double frame_cost(const Mat &M, const Frame &frame, const SurfaceDensity &psi);

double trace_difference(const Mat &A, const Mat &B);

// Closed-form relaxed densities for the purely interfacial energies with
// Psi = |lambda.nu| and Psi = (lambda.nu)^+-.
double exact_H_abs(const Mat &A, const Mat &B);
double exact_H_plus(const Mat &A, const Mat &B);
double exact_H_minus(const Mat &A, const Mat &B);

double exact_h_abs(const Vec &lambda, const Vec &nu);
double exact_h_plus(const Vec &lambda, const Vec &nu);
double exact_h_minus(const Vec &lambda, const Vec &nu);

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }
inline double negative_part(double x) { return x < 0.0 ? -x : 0.0; }

}  // namespace sdrelax
