#include "gridsens/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gridsens/errors.hpp"

namespace gridsens {

namespace {

void require_links(const AssembledNetwork& net) {
    if (net.links.empty()) {
        throw AnalysisError("sensitivity: network has no uncertain links");
    }
}

double quadratic_form(const Vector& B, const Matrix& P) { return B.dot(P * B); }

}  // namespace

GramianSet compute_gramians(const AssembledNetwork& net) {
    require_links(net);
    GramianSet g;
    g.per_link.reserve(net.links.size());
    Matrix forcing = Matrix::Zero(net.dim, net.dim);
    // Per-link solves are independent; kept sequential for determinism.
    for (const auto& link : net.links) {
        Matrix Q = link.C.transpose() * link.C;
        forcing += Q;
        g.per_link.push_back(solve_discrete_lyapunov(net.A, Q));
    }
    g.joint = solve_discrete_lyapunov(net.A, forcing);
    return g;
}

Matrix joint_gramian(const AssembledNetwork& net) {
    require_links(net);
    Matrix forcing = Matrix::Zero(net.dim, net.dim);
    for (const auto& link : net.links) {
        forcing += link.C.transpose() * link.C;
    }
    return solve_discrete_lyapunov(net.A, forcing);
}

Matrix single_link_gramian(const AssembledNetwork& net, size_t link_index) {
    if (link_index >= net.links.size()) {
        throw std::invalid_argument("single_link_gramian: unknown link index " +
                                    std::to_string(link_index));
    }
    const auto& link = net.links[link_index];
    return solve_discrete_lyapunov(net.A, link.C.transpose() * link.C);
}

std::vector<double> f_indices(const AssembledNetwork& net, const Matrix& joint_P) {
    require_links(net);
    std::vector<double> F;
    F.reserve(net.links.size());
    for (const auto& link : net.links) {
        const double gain = quadratic_form(link.B, joint_P) * link.C.squaredNorm();
        if (!(gain > 0.0) || !std::isfinite(gain)) {
            throw AnalysisError("f_indices: degenerate link '" + link.id +
                                "' (zero quadratic form)");
        }
        F.push_back(1.0 / std::sqrt(gain));
    }
    return F;
}

std::vector<double> s_indices(const AssembledNetwork& net, const GramianSet& gramians) {
    require_links(net);
    if (gramians.per_link.size() != net.links.size()) {
        throw std::invalid_argument("s_indices: gramian set does not match network links");
    }
    std::vector<double> S;
    S.reserve(net.links.size());
    for (size_t k = 0; k < net.links.size(); ++k) {
        const double gain = quadratic_form(net.links[k].B, gramians.per_link[k]);
        if (!(gain > 0.0) || !std::isfinite(gain)) {
            throw AnalysisError("s_indices: degenerate link '" + net.links[k].id +
                                "' (zero quadratic form)");
        }
        S.push_back(1.0 / std::sqrt(gain));
    }
    return S;
}

double interaction_index(const std::vector<double>& F, const std::vector<double>& S) {
    if (F.empty() || F.size() != S.size()) {
        throw std::invalid_argument("interaction_index: F and S must be nonempty and same size");
    }
    double dot = 0.0, nf = 0.0, ns = 0.0;
    for (size_t i = 0; i < F.size(); ++i) {
        dot += F[i] * S[i];
        nf += F[i] * F[i];
        ns += S[i] * S[i];
    }
    if (nf == 0.0 || ns == 0.0) {
        throw std::invalid_argument("interaction_index: zero vector");
    }
    const double cosine = dot / (std::sqrt(nf) * std::sqrt(ns));
    // Cauchy-Schwarz bounds the cosine by 1; clamp round-off so I stays in [0, 1].
    return std::clamp(1.0 - cosine, 0.0, 1.0);
}

std::vector<size_t> rank_by_index(const std::vector<double>& values,
                                  const std::vector<std::string>& ids) {
    if (values.size() != ids.size()) {
        throw std::invalid_argument("rank_by_index: values and ids must match");
    }
    std::vector<size_t> order(values.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return ids[a] < ids[b];
    });
    return order;
}

std::vector<size_t> rank_contingencies(const AssembledNetwork& net,
                                       const std::vector<double>& F) {
    if (F.size() != net.links.size()) {
        throw std::invalid_argument("rank_contingencies: F does not match network links");
    }
    std::vector<std::string> ids;
    ids.reserve(net.links.size());
    for (const auto& link : net.links) ids.push_back(link.id);
    return rank_by_index(F, ids);
}

namespace {

std::vector<double> unit_max(const std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / m;
    return out;
}

}  // namespace

SensitivityReport analyze_sensitivity(const AssembledNetwork& net) {
    GramianSet g = compute_gramians(net);
    SensitivityReport r;
    r.ids.reserve(net.links.size());
    for (const auto& link : net.links) r.ids.push_back(link.id);
    r.F = f_indices(net, g.joint);
    r.S = s_indices(net, g);
    r.normalized_F = unit_max(r.F);
    r.normalized_S = unit_max(r.S);
    r.interaction = interaction_index(r.F, r.S);
    r.ranking = rank_contingencies(net, r.F);
    return r;
}

}  // namespace gridsens
