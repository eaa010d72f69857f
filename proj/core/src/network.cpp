#include "gridsens/network.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "gridsens/errors.hpp"

namespace gridsens {

namespace {

void validate_subsystems(std::span<const Subsystem> subsystems) {
    if (subsystems.empty()) {
        throw std::invalid_argument("network: at least one subsystem required");
    }
    const Eigen::Index n = subsystems[0].A.rows();
    for (size_t k = 0; k < subsystems.size(); ++k) {
        const auto& s = subsystems[k];
        const std::string who = "subsystem " + std::to_string(k + 1);
        if (s.A.rows() != s.A.cols()) throw std::invalid_argument(who + ": A must be square");
        if (s.A.rows() != n) throw std::invalid_argument(who + ": state dimension differs");
        if (s.B.size() != n || s.C.size() != n) {
            throw std::invalid_argument(who + ": B/C length must match state dimension");
        }
        require_finite(s.A, who.c_str());
        if (s.B.norm() == 0.0) throw std::invalid_argument(who + ": zero B makes links vacuous");
        if (s.C.norm() == 0.0) throw std::invalid_argument(who + ": zero C makes links vacuous");
    }
}

void validate_node_index(int k, size_t count, const char* who) {
    if (k < 1 || static_cast<size_t>(k) > count) {
        throw std::invalid_argument(std::string(who) + ": node index " + std::to_string(k) +
                                    " out of range [1, " + std::to_string(count) + "]");
    }
}

}  // namespace

RowVector build_link_row(int k, int l, double a, double b,
                         std::span<const Subsystem> subsystems) {
    validate_subsystems(subsystems);
    validate_node_index(k, subsystems.size(), "build_link_row");
    validate_node_index(l, subsystems.size(), "build_link_row");
    if (k == l) throw std::invalid_argument("build_link_row: self-link (k == l) not allowed");
    const Eigen::Index n = subsystems[0].A.rows();
    RowVector row = RowVector::Zero(static_cast<Eigen::Index>(subsystems.size()) * n);
    row.segment((k - 1) * n, n) = a * subsystems[static_cast<size_t>(k - 1)].C;
    row.segment((l - 1) * n, n) = b * subsystems[static_cast<size_t>(l - 1)].C;
    return row;
}

Vector build_injection_column(int k, std::span<const Subsystem> subsystems) {
    validate_subsystems(subsystems);
    validate_node_index(k, subsystems.size(), "build_injection_column");
    const Eigen::Index n = subsystems[0].A.rows();
    Vector col = Vector::Zero(static_cast<Eigen::Index>(subsystems.size()) * n);
    col.segment((k - 1) * n, n) = subsystems[static_cast<size_t>(k - 1)].B;
    return col;
}

AssembledNetwork assemble_network(std::span<const Subsystem> subsystems,
                                  std::span<const CouplingLink> couplings,
                                  std::span<const UncertainLink> uncertain_links) {
    validate_subsystems(subsystems);
    const Eigen::Index n = subsystems[0].A.rows();
    const Eigen::Index dim = static_cast<Eigen::Index>(subsystems.size()) * n;

    Matrix A = Matrix::Zero(dim, dim);
    for (size_t k = 0; k < subsystems.size(); ++k) {
        A.block(static_cast<Eigen::Index>(k) * n, static_cast<Eigen::Index>(k) * n, n, n) =
            subsystems[k].A;
    }
    for (const auto& c : couplings) {
        Vector col = build_injection_column(c.from, subsystems);
        RowVector row = build_link_row(c.from, c.to, c.a, c.b, subsystems);
        A += c.mu * col * row;
    }

    std::vector<LinkDirection> dirs;
    dirs.reserve(uncertain_links.size());
    for (const auto& u : uncertain_links) {
        if (u.sigma < 0.0) {
            throw std::invalid_argument("assemble_network: negative sigma on link " +
                                        std::to_string(u.from) + "-" + std::to_string(u.to));
        }
        auto it = std::find_if(couplings.begin(), couplings.end(), [&](const CouplingLink& c) {
            return c.from == u.from && c.to == u.to;
        });
        if (it == couplings.end()) {
            throw std::invalid_argument("assemble_network: uncertain link " +
                                        std::to_string(u.from) + "-" + std::to_string(u.to) +
                                        " has no matching coupling");
        }
        LinkDirection d;
        d.id = std::to_string(u.from) + "-" + std::to_string(u.to);
        d.B = build_injection_column(u.from, subsystems);
        d.C = build_link_row(it->from, it->to, it->a, it->b, subsystems);
        d.sigma = u.sigma;
        dirs.push_back(std::move(d));
    }
    return network_from_directions(std::move(A), std::move(dirs));
}

AssembledNetwork network_from_directions(Matrix A, std::vector<LinkDirection> directions) {
    if (A.rows() != A.cols() || A.rows() == 0) {
        throw std::invalid_argument("network_from_directions: A must be square and nonempty");
    }
    require_finite(A, "network_from_directions");
    for (const auto& d : directions) {
        if (d.B.size() != A.rows() || d.C.size() != A.rows()) {
            throw std::invalid_argument("network_from_directions: direction '" + d.id +
                                        "' dimension mismatch");
        }
        if (!d.B.allFinite() || !d.C.allFinite()) {
            throw std::invalid_argument("network_from_directions: direction '" + d.id +
                                        "' has non-finite entries");
        }
        if (d.B.norm() == 0.0 || d.C.norm() == 0.0) {
            throw std::invalid_argument("network_from_directions: direction '" + d.id +
                                        "' has a zero B or C vector");
        }
        if (d.sigma < 0.0) {
            throw std::invalid_argument("network_from_directions: direction '" + d.id +
                                        "' has negative sigma");
        }
    }
    AssembledNetwork net;
    net.dim = A.rows();
    net.A = std::move(A);
    net.links = std::move(directions);
    return net;
}

bool AssumptionReport::all_observable() const {
    return std::all_of(links.begin(), links.end(),
                       [](const LinkObservability& l) { return l.observable; });
}

bool AssumptionReport::all_nondegenerate() const {
    return std::all_of(links.begin(), links.end(),
                       [](const LinkObservability& l) { return l.injection_gain > 0.0; });
}

AssumptionReport check_assumptions(const AssembledNetwork& net) {
    AssumptionReport report;
    report.radius = spectral_radius(net.A);
    report.min_singular = smallest_singular_value(net.A);
    if (!(report.radius < 1.0 - kLyapunovStabilityMargin)) {
        return report;  // Gramians do not exist; no observability entries
    }
    for (const auto& link : net.links) {
        Matrix P = solve_discrete_lyapunov(net.A, link.C.transpose() * link.C);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(P, Eigen::EigenvaluesOnly);
        LinkObservability o;
        o.id = link.id;
        o.gramian_min_eig = eig.eigenvalues().minCoeff();
        o.gramian_trace = P.trace();
        o.observable = o.gramian_min_eig > 1e-10 * o.gramian_trace;
        o.injection_gain = link.B.dot(P * link.B);
        report.links.push_back(std::move(o));
    }
    return report;
}

}  // namespace gridsens
