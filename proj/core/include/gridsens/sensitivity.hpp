#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gridsens/network.hpp"

namespace gridsens {

/// Joint Gramian P (forcing = sum of all C^T C) and one Gramian per link.
/// The joint matrix equals the sum of the per-link ones.
struct GramianSet {
    Matrix joint;
    std::vector<Matrix> per_link;  // aligned with AssembledNetwork::links
};

GramianSet compute_gramians(const AssembledNetwork& net);

/// P solving A^T P A - P = -sum_k C_k^T C_k over all uncertain links.
Matrix joint_gramian(const AssembledNetwork& net);

/// P^k solving A^T P A - P = -C_k^T C_k for one link.
Matrix single_link_gramian(const AssembledNetwork& net, size_t link_index);

/// Joint-uncertainty sensitivity per link: (B^T P B * ||C||^2)^(-1/2).
/// Larger value = more tolerance = less critical.
std::vector<double> f_indices(const AssembledNetwork& net, const Matrix& joint_P);

/// Single-uncertainty sensitivity per link: (B^T P^k B)^(-1/2).
std::vector<double> s_indices(const AssembledNetwork& net, const GramianSet& gramians);

/// 1 - cos(F, S): 0 for aligned vectors, approaching 1 when the joint
/// analysis reorders criticality relative to the one-at-a-time analysis.
double interaction_index(const std::vector<double>& F, const std::vector<double>& S);

/// Link indices sorted ascending by F (most critical first). Stable;
/// ties broken by link id (lexicographic).
std::vector<size_t> rank_contingencies(const AssembledNetwork& net,
                                       const std::vector<double>& F);

/// The same ordering rule applied to an arbitrary index vector.
std::vector<size_t> rank_by_index(const std::vector<double>& values,
                                  const std::vector<std::string>& ids);

struct SensitivityReport {
    std::vector<std::string> ids;         // link order of the network
    std::vector<double> F;
    std::vector<double> S;
    std::vector<double> normalized_F;     // unit-max copies for reporting
    std::vector<double> normalized_S;
    double interaction = 0.0;
    std::vector<size_t> ranking;          // most critical first
};

/// Full pipeline: Gramians, F/S indices, interaction index, ranking.
SensitivityReport analyze_sensitivity(const AssembledNetwork& net);

}  // namespace gridsens
