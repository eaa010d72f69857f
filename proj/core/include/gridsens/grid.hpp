#pragma once

#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "gridsens/matpower.hpp"
#include "gridsens/network.hpp"

namespace gridsens {

/// Swing-dynamics parameters. Inertia/damping apply per generator bus, with
/// the scalar default for buses not listed.
struct DynamicsConfig {
    double delta_t = 0.01;  // seconds
    double inertia_default = 1.0;
    double damping_default = 1.0;
    std::map<int, double> inertia_by_bus;
    std::map<int, double> damping_by_bus;
    double sigma = 1.0;  // standard deviation assigned to every contingency link
    std::vector<std::pair<int, int>> contingencies;
};

/// Parses the JSON dynamics document:
/// {"delta_t": s, "inertia": x | {"bus": x}, "damping": x | {"bus": x},
///  "sigma": x, "contingencies": ["37-25", ...]}.
DynamicsConfig parse_dynamics_config(std::string_view json_text);

/// Graph Laplacian weighted by branch susceptance 1/x; parallel branches sum.
Matrix build_laplacian(const GridCase& c);

/// Schur complement onto the generator block:
/// L_red = L_gg - L_gl L_ll^{-1} L_lg. Zero row sums and PSD are preserved.
/// `labels`, when nonempty, names the nodes in error messages (bus ids).
Matrix kron_reduce(const Eigen::Ref<const Matrix>& L, const std::vector<int>& gen_indices,
                   const std::vector<int>& load_indices,
                   const std::vector<int>& labels = {});

/// Continuous swing map over [angle; frequency]:
/// [[0, I], [-M^{-1} L_red, -M^{-1} D]] with diagonal positive M, D.
Matrix swing_state_matrix(const Eigen::Ref<const Matrix>& L_red, const Vector& inertia,
                          const Vector& damping);

/// Forward-Euler map I + A_c * delta_t.
Matrix discretize(const Eigen::Ref<const Matrix>& A_c, double delta_t);

/// Grid model after Kron reduction and discretization. The state ordering is
/// [angle; frequency] over generators in bus-table order.
struct ReducedModel {
    Matrix L;                     // full Laplacian, bus-table order
    std::vector<int> load_indices;
    std::vector<int> gen_indices;
    std::vector<int> gen_bus_ids;  // bus ids of the generator block, in order
    Matrix L_red;
    Vector inertia;   // per generator
    Vector damping;   // per generator
    Matrix A_c;
    Matrix A_d;
    double delta_t = 0.0;
};

ReducedModel build_reduced_model(const GridCase& c, const DynamicsConfig& config);

/// Rank-one uncertainty direction of a line (i, j): the Kron-reduced
/// Laplacian moves by d(susceptance) * v v^T with
/// v = u_g - L_gl L_ll^{-1} u_l, u = e_i - e_j, so the perturbation enters
/// the discrete state map as delta * B C with B = delta_t * [0; -M^{-1} v]
/// and C = [v^T, 0]. Exact to first order in the susceptance change.
struct OutageDirection {
    Vector B;     // length 2g
    RowVector C;  // length 2g
};

OutageDirection outage_direction(const GridCase& c, const ReducedModel& model,
                                 std::pair<int, int> line);

/// The swing model is shift-invariant in the angles, which parks one
/// eigenvalue of A_d exactly at 1 (left mode [D 1; M 1]). Analysis runs on
/// the invariant complement of that mode (dimension 2g - 1); every outage
/// direction is orthogonal to it, so the quotient changes no Gramian or
/// growth quantity while making the nominal map strictly stable.
struct QuotientMap {
    Matrix basis;  // 2g x (2g-1), orthonormal columns spanning the complement
    Matrix A;      // basis^T A_d basis
};

QuotientMap grid_quotient(const ReducedModel& model);

/// Reduced model plus the analysis network built from it (see QuotientMap).
struct GridBuild {
    ReducedModel model;
    AssembledNetwork net;
    Matrix quotient_basis;  // 2g x (2g-1), orthonormal columns
};

GridBuild build_grid(const GridCase& c, const DynamicsConfig& config);

/// Convenience wrapper returning only the analysis network.
AssembledNetwork build_grid_network(const GridCase& c, const DynamicsConfig& config);

}  // namespace gridsens
