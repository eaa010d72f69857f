#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

namespace gridsens {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Eigenvalues of a square matrix together with the spectral radius.
struct Spectrum {
    Eigen::VectorXcd eigenvalues;
    double radius = 0.0;
};

/// Throws std::invalid_argument if the matrix contains NaN or Inf.
void require_finite(const Eigen::Ref<const Matrix>& A, const char* who);

/// All eigenvalues of a real square matrix (Hessenberg + shifted-QR iteration).
Spectrum eigenvalues(const Eigen::Ref<const Matrix>& A);

/// Maximum eigenvalue modulus.
double spectral_radius(const Eigen::Ref<const Matrix>& A);

/// Smallest singular value.
double smallest_singular_value(const Eigen::Ref<const Matrix>& A);

/// Kronecker product, used by the vectorized Lyapunov and second-moment solves.
Matrix kronecker(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& B);

/// Margin below 1 required of spectral_radius(A) before a Lyapunov solve is attempted.
inline constexpr double kLyapunovStabilityMargin = 1e-9;

/// Solves A^T P A - P = -Q for symmetric PSD P.
///
/// Requires spectral_radius(A) < 1 - kLyapunovStabilityMargin and Q symmetric
/// (asymmetry beyond 1e-12 relative is rejected). The returned P is
/// symmetrized to remove round-off drift. Dimension <= 60 uses the dense
/// Kronecker-vectorized solve, larger systems the squaring iteration.
Matrix solve_discrete_lyapunov(const Eigen::Ref<const Matrix>& A,
                               const Eigen::Ref<const Matrix>& Q);

/// Direct route: solve (I - A^T (x) A^T) vec(P) = vec(Q).
Matrix solve_discrete_lyapunov_direct(const Eigen::Ref<const Matrix>& A,
                                      const Eigen::Ref<const Matrix>& Q);

/// Squaring route: P <- P + X^T P X with X <- X^2 until the update norm
/// drops below 1e-14.
Matrix solve_discrete_lyapunov_doubling(const Eigen::Ref<const Matrix>& A,
                                        const Eigen::Ref<const Matrix>& Q);

}  // namespace gridsens
