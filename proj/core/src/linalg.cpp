#include "gridsens/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <string>

#include "gridsens/errors.hpp"

namespace gridsens {

void require_finite(const Eigen::Ref<const Matrix>& A, const char* who) {
    if (!A.allFinite()) {
        throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
    }
}

namespace {

void require_square(const Eigen::Ref<const Matrix>& A, const char* who) {
    if (A.rows() != A.cols()) {
        throw std::invalid_argument(std::string(who) + ": matrix must be square, got " +
                                    std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
    }
    if (A.rows() == 0) {
        throw std::invalid_argument(std::string(who) + ": matrix is empty");
    }
}

}  // namespace

Spectrum eigenvalues(const Eigen::Ref<const Matrix>& A) {
    require_square(A, "eigenvalues");
    require_finite(A, "eigenvalues");
    Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw AnalysisError("eigenvalues: QR iteration did not converge");
    }
    Spectrum s;
    s.eigenvalues = solver.eigenvalues();
    s.radius = s.eigenvalues.cwiseAbs().maxCoeff();
    return s;
}

double spectral_radius(const Eigen::Ref<const Matrix>& A) { return eigenvalues(A).radius; }

double smallest_singular_value(const Eigen::Ref<const Matrix>& A) {
    require_finite(A, "smallest_singular_value");
    if (A.size() == 0) {
        throw std::invalid_argument("smallest_singular_value: matrix is empty");
    }
    Eigen::JacobiSVD<Matrix> svd(A);
    return svd.singularValues().minCoeff();
}

Matrix kronecker(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return K;
}

namespace {

void check_lyapunov_inputs(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& Q) {
    require_square(A, "solve_discrete_lyapunov");
    require_finite(A, "solve_discrete_lyapunov");
    if (Q.rows() != A.rows() || Q.cols() != A.cols()) {
        throw std::invalid_argument("solve_discrete_lyapunov: Q dimension mismatch");
    }
    require_finite(Q, "solve_discrete_lyapunov");
    const double asym = (Q - Q.transpose()).norm();
    if (asym > 1e-12 * std::max(1.0, Q.norm())) {
        throw std::invalid_argument("solve_discrete_lyapunov: Q is not symmetric");
    }
    const double radius = spectral_radius(A);
    if (!(radius < 1.0 - kLyapunovStabilityMargin)) {
        throw AnalysisError("solve_discrete_lyapunov: spectral radius " + std::to_string(radius) +
                            " is not below 1; the Lyapunov series diverges");
    }
}

Matrix symmetrize(Matrix P) {
    P = ((P + P.transpose()) / 2.0).eval();
    return P;
}

}  // namespace

Matrix solve_discrete_lyapunov_direct(const Eigen::Ref<const Matrix>& A,
                                      const Eigen::Ref<const Matrix>& Q) {
    check_lyapunov_inputs(A, Q);
    const Eigen::Index n = A.rows();
    Matrix At = A.transpose();
    Matrix K = Matrix::Identity(n * n, n * n) - kronecker(At, At);
    Vector vecQ = Eigen::Map<const Vector>(Q.data(), n * n);
    Vector vecP = K.partialPivLu().solve(vecQ);
    Matrix P = Eigen::Map<const Matrix>(vecP.data(), n, n);
    return symmetrize(std::move(P));
}

Matrix solve_discrete_lyapunov_doubling(const Eigen::Ref<const Matrix>& A,
                                        const Eigen::Ref<const Matrix>& Q) {
    check_lyapunov_inputs(A, Q);
    Matrix P = Q;
    Matrix X = A;
    constexpr int kMaxIterations = 200;
    for (int it = 0; it < kMaxIterations; ++it) {
        Matrix update = X.transpose() * P * X;
        P += update;
        if (update.norm() < 1e-14) {
            break;
        }
        X = (X * X).eval();
    }
    return symmetrize(std::move(P));
}

Matrix solve_discrete_lyapunov(const Eigen::Ref<const Matrix>& A,
                               const Eigen::Ref<const Matrix>& Q) {
    if (A.rows() <= 60) {
        return solve_discrete_lyapunov_direct(A, Q);
    }
    return solve_discrete_lyapunov_doubling(A, Q);
}

}  // namespace gridsens
