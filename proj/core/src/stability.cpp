#include "gridsens/stability.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gridsens/errors.hpp"
#include "gridsens/rng.hpp"

namespace gridsens {

namespace {

void check_sigmas(const AssembledNetwork& net, const SigmaAssignment& sigmas, const char* who) {
    if (sigmas.size() != net.links.size()) {
        throw std::invalid_argument(std::string(who) + ": got " + std::to_string(sigmas.size()) +
                                    " sigmas for " + std::to_string(net.links.size()) + " links");
    }
    for (double s : sigmas) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument(std::string(who) + ": sigmas must be finite and >= 0");
        }
    }
}

Matrix apply_second_moment(const AssembledNetwork& net, const SigmaAssignment& sigmas,
                           const Matrix& P) {
    Matrix out = net.A.transpose() * P * net.A;
    for (size_t k = 0; k < net.links.size(); ++k) {
        const auto& link = net.links[k];
        const double gain = link.B.dot(P * link.B);
        out.noalias() += (sigmas[k] * sigmas[k] * gain) * (link.C.transpose() * link.C);
    }
    return out;
}

}  // namespace

Matrix second_moment_matrix(const AssembledNetwork& net, const SigmaAssignment& sigmas) {
    check_sigmas(net, sigmas, "second_moment_matrix");
    const Eigen::Index n = net.dim;
    Matrix At = net.A.transpose();
    Matrix M = kronecker(At, At);
    for (size_t k = 0; k < net.links.size(); ++k) {
        const auto& link = net.links[k];
        Matrix CtC = link.C.transpose() * link.C;
        Vector vecCtC = Eigen::Map<const Vector>(CtC.data(), n * n);
        Vector BkronB(n * n);
        for (Eigen::Index j = 0; j < n; ++j) {
            BkronB.segment(j * n, n) = link.B(j) * link.B;
        }
        M.noalias() += (sigmas[k] * sigmas[k]) * vecCtC * BkronB.transpose();
    }
    return M;
}

namespace {

struct PowerIterationResult {
    double radius = 0.0;
    Matrix eigenmatrix;  // PSD, unit Frobenius norm
};

PowerIterationResult second_moment_power_iteration(const AssembledNetwork& net,
                                                   const SigmaAssignment& sigmas) {
    Matrix P = Matrix::Identity(net.dim, net.dim);
    P /= P.norm();
    PowerIterationResult result;
    constexpr int kMaxSweeps = 10000;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        Matrix TP = apply_second_moment(net, sigmas, P);
        const double norm = TP.norm();
        result.radius = P.cwiseProduct(TP).sum();  // Rayleigh quotient, ||P|| = 1
        if (norm == 0.0) {
            result.radius = 0.0;
            result.eigenmatrix = std::move(P);
            return result;
        }
        TP /= norm;
        if ((TP - P).norm() < 1e-10) {
            result.radius = norm;
            result.eigenmatrix = std::move(TP);
            return result;
        }
        P = std::move(TP);
    }
    result.eigenmatrix = std::move(P);
    return result;
}

}  // namespace

double mss_spectral_radius_power(const AssembledNetwork& net, const SigmaAssignment& sigmas) {
    check_sigmas(net, sigmas, "mss_spectral_radius_power");
    return second_moment_power_iteration(net, sigmas).radius;
}

double mss_spectral_radius(const AssembledNetwork& net, const SigmaAssignment& sigmas) {
    check_sigmas(net, sigmas, "mss_spectral_radius");
    if (net.dim <= 30) {
        Matrix M = second_moment_matrix(net, sigmas);
        return spectral_radius(M);
    }
    return mss_spectral_radius_power(net, sigmas);
}

namespace {

double bisect_boundary_radius(const AssembledNetwork& net, double dir1, double dir2,
                              double hi, double tol) {
    double lo = 0.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mss_spectral_radius(net, {mid * dir1, mid * dir2}) < 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double axis_bound(const AssembledNetwork& net, int axis, double tol) {
    double hi = 1.0;
    int doublings = 0;
    auto rho = [&](double r) {
        return mss_spectral_radius(net, axis == 0 ? SigmaAssignment{r, 0.0}
                                                  : SigmaAssignment{0.0, r});
    };
    while (rho(hi) < 1.0) {
        hi *= 2.0;
        if (++doublings > 60) {
            throw AnalysisError("feasibility_boundary: region appears unbounded along axis " +
                                std::to_string(axis + 1));
        }
    }
    double lo = 0.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (rho(mid) < 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

RegionResult feasibility_boundary(const AssembledNetwork& net, int n_angles, double tol) {
    if (net.links.size() != 2) {
        throw AnalysisError("feasibility_boundary: exactly two uncertain links required, got " +
                            std::to_string(net.links.size()));
    }
    if (n_angles < 8) {
        throw std::invalid_argument("feasibility_boundary: n_angles must be >= 8");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("feasibility_boundary: tol must be positive");
    }
    if (mss_spectral_radius(net, {0.0, 0.0}) >= 1.0) {
        throw AnalysisError("feasibility_boundary: nominal system is unstable, no feasible region");
    }

    RegionResult region;
    region.siso_bounds = {axis_bound(net, 0, tol), axis_bound(net, 1, tol)};
    // Feasibility at (s1, s2) implies feasibility of each coordinate alone, so
    // the region sits inside the SISO box and this bracket always covers it.
    const double r_max = 10.0 * std::max(region.siso_bounds[0], region.siso_bounds[1]);

    region.angles.reserve(n_angles);
    region.radii.reserve(n_angles);
    region.boundary.reserve(n_angles);
    const double half_pi = 1.5707963267948966;
    for (int i = 0; i < n_angles; ++i) {
        const double theta = half_pi * static_cast<double>(i) / (n_angles - 1);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const double r = bisect_boundary_radius(net, c, s, r_max, tol);
        region.angles.push_back(theta);
        region.radii.push_back(r);
        region.boundary.push_back({r * c, r * s});
    }
    region.uniform_square = scaled_rectangle(region, 1.0, 1.0);
    return region;
}

Rectangle scaled_rectangle(const RegionResult& region, double w1, double w2) {
    if (!(w1 > 0.0) || !(w2 > 0.0)) {
        throw std::invalid_argument("scaled_rectangle: weights must be positive");
    }
    if (region.boundary.size() < 2) {
        throw std::invalid_argument("scaled_rectangle: region has no boundary polyline");
    }
    const double norm = std::hypot(w1, w2);
    const double d1 = w1 / norm;
    const double d2 = w2 / norm;
    for (size_t k = 0; k + 1 < region.boundary.size(); ++k) {
        const auto& p = region.boundary[k];
        const auto& q = region.boundary[k + 1];
        // p + t (q - p) = s (d1, d2)
        const double e1 = q[0] - p[0];
        const double e2 = q[1] - p[1];
        const double det = e1 * (-d2) - e2 * (-d1);
        if (det == 0.0) continue;
        const double t = (-p[0] * (-d2) - (-p[1]) * (-d1)) / det;
        const double s = (e1 * (-p[1]) - e2 * (-p[0])) / det;
        if (t >= -1e-12 && t <= 1.0 + 1e-12 && s >= 0.0) {
            Rectangle rect;
            rect.corner = {p[0] + t * e1, p[1] + t * e2};
            rect.area = rect.corner[0] * rect.corner[1];
            return rect;
        }
    }
    throw AnalysisError("scaled_rectangle: ray does not intersect the boundary polyline");
}

std::vector<Matrix> propagate_second_moment(const AssembledNetwork& net,
                                            const SigmaAssignment& sigmas,
                                            const Matrix& sigma0, int steps) {
    check_sigmas(net, sigmas, "propagate_second_moment");
    if (steps < 1) {
        throw std::invalid_argument("propagate_second_moment: steps must be >= 1");
    }
    if (sigma0.rows() != net.dim || sigma0.cols() != net.dim) {
        throw std::invalid_argument("propagate_second_moment: Sigma0 dimension mismatch");
    }
    if ((sigma0 - sigma0.transpose()).norm() > 1e-12 * std::max(1.0, sigma0.norm())) {
        throw std::invalid_argument("propagate_second_moment: Sigma0 is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma0, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, sigma0.trace())) {
        throw std::invalid_argument("propagate_second_moment: Sigma0 is not PSD");
    }

    std::vector<Matrix> trajectory;
    trajectory.reserve(static_cast<size_t>(steps) + 1);
    trajectory.push_back(sigma0);
    Matrix current = sigma0;
    for (int t = 0; t < steps; ++t) {
        Matrix next = net.A * current * net.A.transpose();
        for (size_t k = 0; k < net.links.size(); ++k) {
            const auto& link = net.links[k];
            const double output_var = link.C * current * link.C.transpose();
            next.noalias() +=
                (sigmas[k] * sigmas[k] * output_var) * (link.B * link.B.transpose());
        }
        current = ((next + next.transpose()) / 2.0).eval();
        trajectory.push_back(current);
    }
    return trajectory;
}

MonteCarloResult monte_carlo_growth(const AssembledNetwork& net, const SigmaAssignment& sigmas,
                                    int trials, int horizon, std::uint64_t seed) {
    check_sigmas(net, sigmas, "monte_carlo_growth");
    if (trials < 100) {
        throw std::invalid_argument("monte_carlo_growth: trials must be >= 100");
    }
    if (horizon < 50) {
        throw std::invalid_argument("monte_carlo_growth: horizon must be >= 50");
    }

    // Fixed initial state along the top eigenvector of the second-moment
    // fixed point: it carries an Omega(1/n) weight on the dominant mode, so
    // the asymptotic growth shows up before the trial weights degenerate.
    const Eigen::Index n = net.dim;
    Vector x0;
    {
        Matrix fixed_point = second_moment_power_iteration(net, sigmas).eigenmatrix;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(fixed_point);
        x0 = eig.eigenvectors().col(n - 1);
        Eigen::Index lead;
        x0.cwiseAbs().maxCoeff(&lead);
        if (x0(lead) < 0.0) x0 = -x0;
        x0.normalize();
    }
    const double neg_inf = -std::numeric_limits<double>::infinity();

    // Streaming log-sum-exp of ||x(t)||^2 and its square over trials keeps
    // the estimator finite for strongly growing or decaying systems; the
    // second accumulator yields the effective sample size of the weights.
    struct LogSumExp {
        double max;
        double sum;
        void add(double v) {
            if (v > max) {
                sum = sum * std::exp(max - v) + 1.0;
                max = v;
            } else {
                sum += std::exp(v - max);
            }
        }
        double value() const { return max + std::log(sum); }
    };
    std::vector<LogSumExp> lse_w(static_cast<size_t>(horizon) + 1, LogSumExp{neg_inf, 0.0});
    std::vector<LogSumExp> lse_w2(static_cast<size_t>(horizon) + 1, LogSumExp{neg_inf, 0.0});
    auto accumulate = [&](size_t t, double v) {
        if (v == neg_inf) return;
        lse_w[t].add(v);
        lse_w2[t].add(2.0 * v);
    };

    for (int trial = 0; trial < trials; ++trial) {
        SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(trial));
        Vector x = x0;
        double log_offset = 0.0;
        for (int t = 0; t <= horizon; ++t) {
            const double s2 = x.squaredNorm();
            accumulate(static_cast<size_t>(t), s2 > 0.0 ? log_offset + std::log(s2) : neg_inf);
            if (t == horizon) break;
            Vector next = net.A * x;
            for (size_t k = 0; k < net.links.size(); ++k) {
                const double delta = sigmas[k] * rng.gaussian();
                const double output = net.links[k].C.dot(x);
                next.noalias() += (delta * output) * net.links[k].B;
            }
            x = std::move(next);
            const double norm2 = x.squaredNorm();
            if (norm2 > 1e100 || (norm2 > 0.0 && norm2 < 1e-100)) {
                log_offset += std::log(norm2);
                x /= std::sqrt(norm2);
            }
        }
    }

    MonteCarloResult result;
    result.mean_sq_norm.resize(static_cast<size_t>(horizon) + 1);
    std::vector<double> log_mean(static_cast<size_t>(horizon) + 1);
    const double log_trials = std::log(static_cast<double>(trials));
    for (size_t t = 0; t < log_mean.size(); ++t) {
        log_mean[t] = lse_w[t].max == neg_inf ? neg_inf : lse_w[t].value() - log_trials;
        result.mean_sq_norm[t] = std::exp(log_mean[t]);
    }

    // Trust the mean estimate only while the trial-weight effective sample
    // size (sum w)^2 / sum w^2 stays above the floor.
    constexpr double kMinEffectiveSamples = 32.0;
    int window_end = 0;
    for (size_t t = 0; t < log_mean.size(); ++t) {
        if (log_mean[t] == neg_inf) break;
        const double log_ess = 2.0 * lse_w[t].value() - lse_w2[t].value();
        if (std::exp(log_ess) < std::min(kMinEffectiveSamples, static_cast<double>(trials))) {
            break;
        }
        window_end = static_cast<int>(t);
    }
    if (window_end < 1) {
        throw AnalysisError("monte_carlo_growth: trial weights degenerate immediately, "
                            "growth rate undefined");
    }
    result.estimate.effective_horizon = window_end;

    // Least-squares slope of log E||x||^2 against t over the trusted window,
    // after a short burn-in that sheds the remaining transient modes.
    const int burn = std::clamp(window_end / 3, 0, 8);
    const int count = window_end - burn + 1;
    double tbar = 0.0, ybar = 0.0;
    for (int t = burn; t <= window_end; ++t) {
        tbar += t;
        ybar += log_mean[static_cast<size_t>(t)];
    }
    tbar /= count;
    ybar /= count;
    double sxx = 0.0, sxy = 0.0;
    for (int t = burn; t <= window_end; ++t) {
        const double dt = t - tbar;
        sxx += dt * dt;
        sxy += dt * (log_mean[static_cast<size_t>(t)] - ybar);
    }
    result.estimate.rate = sxy / sxx;
    double ss_res = 0.0;
    for (int t = burn; t <= window_end; ++t) {
        const double fit = ybar + result.estimate.rate * (t - tbar);
        const double r = log_mean[static_cast<size_t>(t)] - fit;
        ss_res += r * r;
    }
    const double dof = std::max(1, count - 2);
    result.estimate.half_width = 1.96 * std::sqrt(ss_res / dof / sxx);
    return result;
}

}  // namespace gridsens
