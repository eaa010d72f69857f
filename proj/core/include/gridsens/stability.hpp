#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gridsens/network.hpp"

namespace gridsens {

/// Per-link standard deviations, aligned with AssembledNetwork::links.
using SigmaAssignment = std::vector<double>;

/// Dense matrix representation of the second-moment operator
/// T(P) = A^T P A + sum_k sigma_k^2 (B_k^T P B_k) C_k^T C_k
/// acting on vec(P). Mean-square stability holds iff its spectral radius
/// is below 1.
Matrix second_moment_matrix(const AssembledNetwork& net, const SigmaAssignment& sigmas);

/// Spectral radius of the second-moment operator. Dimension <= 30 uses the
/// dense vectorized route; larger systems fall back to power iteration on
/// the PSD cone (accuracy degrades when the operator has no spectral gap).
double mss_spectral_radius(const AssembledNetwork& net, const SigmaAssignment& sigmas);

/// Power-iteration route, exposed for cross-checking against the dense one.
/// Iterates P <- T(P)/||T(P)|| from P = I; 1e-10 convergence, 10000-sweep cap.
double mss_spectral_radius_power(const AssembledNetwork& net, const SigmaAssignment& sigmas);

struct Rectangle {
    std::array<double, 2> corner{0.0, 0.0};
    double area = 0.0;
};

/// Boundary of the mean-square-stability region over two uncertainty
/// standard deviations, swept by bisection along rays from the origin.
struct RegionResult {
    std::vector<double> angles;                     // radians in [0, pi/2]
    std::vector<double> radii;                      // boundary radius per angle
    std::vector<std::array<double, 2>> boundary;    // (sigma1, sigma2) polyline
    std::array<double, 2> siso_bounds{0.0, 0.0};    // single-uncertainty axis bounds
    Rectangle uniform_square;                       // corner on the sigma2 = sigma1 ray
    Rectangle f_scaled;                             // filled by callers via scaled_rectangle
    Rectangle s_scaled;
};

/// Maps the feasibility boundary for a network with exactly two uncertain
/// links. `tol` is the bisection tolerance on the ray radius.
RegionResult feasibility_boundary(const AssembledNetwork& net, int n_angles = 181,
                                  double tol = 1e-6);

/// Corner of the axis-aligned rectangle whose corner lies on the boundary
/// polyline along the ray (sigma1, sigma2) ~ (w1, w2); both weights positive.
Rectangle scaled_rectangle(const RegionResult& region, double w1, double w2);

/// Exact second-moment propagation Sigma' = A Sigma A^T +
/// sum sigma^2 (C Sigma C^T) B B^T. Returns [Sigma_0, ..., Sigma_steps].
std::vector<Matrix> propagate_second_moment(const AssembledNetwork& net,
                                            const SigmaAssignment& sigmas,
                                            const Matrix& sigma0, int steps);

struct GrowthEstimate {
    double rate = 0.0;          // least-squares slope of log E||x||^2 vs t
    double half_width = 0.0;    // 1.96 * standard error of the slope
    int effective_horizon = 0;  // last step whose mean estimate was trusted
};

struct MonteCarloResult {
    std::vector<double> mean_sq_norm;  // E||x(t)||^2 estimate, t = 0..horizon
    GrowthEstimate estimate;
};

/// Simulates x(t+1) = (A + sum delta_k(t) B_k C_k) x(t) with i.i.d. Gaussian
/// delta_k ~ N(0, sigma_k^2) from a fixed unit initial state, averaged over
/// trials. Deterministic for a fixed seed regardless of how trials are split.
///
/// Multiplicative noise makes the sample mean of ||x||^2 degenerate at long
/// horizons (a handful of trajectories carry all the weight), so the slope is
/// fit only over the prefix where the effective sample size of the trial
/// weights stays above 32; `effective_horizon` reports that cutoff.
MonteCarloResult monte_carlo_growth(const AssembledNetwork& net, const SigmaAssignment& sigmas,
                                    int trials, int horizon, std::uint64_t seed);

}  // namespace gridsens
