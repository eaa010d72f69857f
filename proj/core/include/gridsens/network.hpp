#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridsens/linalg.hpp"

namespace gridsens {

/// One node of the interconnected system: x' = A x + B u, y = C x.
/// All subsystems in a network share the per-node state dimension.
struct Subsystem {
    Matrix A;     // n x n state map
    Vector B;     // length-n input column, nonzero
    RowVector C;  // length-n output row, nonzero
};

/// Directed coupling (from, to): feeds mu * (a*y_from + b*y_to) into node `from`.
/// Node indices are 1-based.
struct CouplingLink {
    int from = 0;
    int to = 0;
    double mu = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// Marks a coupling as stochastic with standard deviation `sigma`.
struct UncertainLink {
    int from = 0;
    int to = 0;
    double sigma = 0.0;
};

/// A rank-one perturbation direction of the compact system:
/// x(t+1) = A x(t) + sum_k delta_k(t) B_k C_k x(t).
struct LinkDirection {
    std::string id;
    Vector B;     // injection column, full state dimension
    RowVector C;  // output row, full state dimension
    double sigma = 0.0;
};

/// Compact form of the interconnected system with its uncertain directions.
/// Immutable after construction; safe to share across threads.
struct AssembledNetwork {
    Eigen::Index dim = 0;
    Matrix A;
    std::vector<LinkDirection> links;
};

/// Output row of link (k, l): a*C_k in block k, b*C_l in block l, zeros elsewhere.
RowVector build_link_row(int k, int l, double a, double b, std::span<const Subsystem> subsystems);

/// Injection column of node k: B_k in block k, zeros elsewhere.
Vector build_injection_column(int k, std::span<const Subsystem> subsystems);

/// Builds the compact system matrix A = blockdiag(A_k) + sum mu * B_k C_kl and
/// one LinkDirection per uncertain link. Every uncertain link must reference a
/// declared coupling.
AssembledNetwork assemble_network(std::span<const Subsystem> subsystems,
                                  std::span<const CouplingLink> couplings,
                                  std::span<const UncertainLink> uncertain_links);

/// Wraps a system already given in compact form. Directions keep their order.
AssembledNetwork network_from_directions(Matrix A, std::vector<LinkDirection> directions);

/// Observability verdict for one uncertain direction, decided from the
/// single-link Gramian spectrum (positive definite iff observable).
struct LinkObservability {
    std::string id;
    bool observable = false;
    double gramian_min_eig = 0.0;
    double gramian_trace = 0.0;
    double injection_gain = 0.0;  // B^T P B, strict positivity makes the link non-degenerate
};

struct AssumptionReport {
    double radius = 0.0;        // spectral radius of the nominal map
    double min_singular = 0.0;  // smallest singular value of A
    std::vector<LinkObservability> links;

    bool stable() const { return radius < 1.0; }
    bool all_observable() const;
    /// Every direction carries signal: B^T P B strictly positive.
    bool all_nondegenerate() const;
};

/// Evaluates the stability / lower-bound / observability assumptions.
/// Reports only; callers decide what is fatal. Gramians require radius < 1,
/// so observability entries are absent when the nominal map is unstable.
AssumptionReport check_assumptions(const AssembledNetwork& net);

}  // namespace gridsens
