#pragma once

// Shared generators and helpers for the test binaries.

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "gridsens/linalg.hpp"
#include "gridsens/network.hpp"

namespace testsup {

using gridsens::Matrix;
using gridsens::RowVector;
using gridsens::Vector;

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix A(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) A(i, j) = dist(rng);
    return A;
}

/// Random matrix rescaled to an exact target spectral radius.
inline Matrix random_stable(std::mt19937_64& rng, int n, double target_radius) {
    for (;;) {
        Matrix A = random_matrix(rng, n, n);
        const double r = gridsens::spectral_radius(A);
        if (r > 1e-8) return A * (target_radius / r);
    }
}

inline Matrix random_psd(std::mt19937_64& rng, int n) {
    Matrix G = random_matrix(rng, n, n);
    return G * G.transpose();
}

inline Vector random_nonzero_vector(std::mt19937_64& rng, int n) {
    for (;;) {
        Vector v = random_matrix(rng, n, 1);
        if (v.norm() > 1e-6) return v;
    }
}

inline gridsens::AssembledNetwork random_network(std::mt19937_64& rng, int dim, int n_links,
                                                 double radius = 0.8) {
    std::uniform_real_distribution<double> sig(0.1, 0.5);
    Matrix A = random_stable(rng, dim, radius);
    std::vector<gridsens::LinkDirection> links(static_cast<size_t>(n_links));
    for (int k = 0; k < n_links; ++k) {
        auto& link = links[static_cast<size_t>(k)];
        link.id = "L" + std::to_string(k + 1);
        link.B = random_nonzero_vector(rng, dim);
        link.C = random_nonzero_vector(rng, dim).transpose();
        link.sigma = sig(rng);
    }
    return gridsens::network_from_directions(std::move(A), std::move(links));
}

/// Compares an eigenvalue list against expected real values as multisets.
inline bool matches_real_spectrum(const Eigen::VectorXcd& eigs, std::vector<double> expected,
                                  double tol) {
    if (static_cast<size_t>(eigs.size()) != expected.size()) return false;
    std::vector<double> got;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        if (std::abs(eigs(i).imag()) > tol) return false;
        got.push_back(eigs(i).real());
    }
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    for (size_t i = 0; i < got.size(); ++i) {
        if (std::abs(got[i] - expected[i]) > tol) return false;
    }
    return true;
}

inline double min_eigenvalue(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

}  // namespace testsup
