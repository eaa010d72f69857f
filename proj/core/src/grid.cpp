#include "gridsens/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <string>

#include <json.hpp>

#include "gridsens/errors.hpp"

namespace gridsens {

namespace {

std::pair<int, int> parse_line_token(const std::string& token) {
    const size_t dash = token.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 >= token.size()) {
        throw ParseError("contingency '" + token + "' is not of the form '<bus>-<bus>'");
    }
    try {
        return {std::stoi(token.substr(0, dash)), std::stoi(token.substr(dash + 1))};
    } catch (const std::exception&) {
        throw ParseError("contingency '" + token + "' is not of the form '<bus>-<bus>'");
    }
}

void read_per_bus(const nlohmann::json& node, double& scalar, std::map<int, double>& by_bus,
                  const char* key) {
    if (node.is_number()) {
        scalar = node.get<double>();
        return;
    }
    if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it) {
            int bus;
            try {
                bus = std::stoi(it.key());
            } catch (const std::exception&) {
                throw ParseError(std::string(key) + ": bus key '" + it.key() +
                                 "' is not an integer");
            }
            if (!it.value().is_number()) {
                throw ParseError(std::string(key) + ": value for bus " + it.key() +
                                 " is not a number");
            }
            by_bus[bus] = it.value().get<double>();
        }
        return;
    }
    throw ParseError(std::string(key) + ": expected a number or {bus: number} object");
}

}  // namespace

DynamicsConfig parse_dynamics_config(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("dynamics config: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("dynamics config: top level must be an object");

    DynamicsConfig config;
    if (doc.contains("delta_t")) {
        if (!doc["delta_t"].is_number()) throw ParseError("delta_t must be a number");
        config.delta_t = doc["delta_t"].get<double>();
    }
    if (doc.contains("inertia")) {
        read_per_bus(doc["inertia"], config.inertia_default, config.inertia_by_bus, "inertia");
    }
    if (doc.contains("damping")) {
        read_per_bus(doc["damping"], config.damping_default, config.damping_by_bus, "damping");
    }
    if (doc.contains("sigma")) {
        if (!doc["sigma"].is_number()) throw ParseError("sigma must be a number");
        config.sigma = doc["sigma"].get<double>();
    }
    if (doc.contains("contingencies")) {
        if (!doc["contingencies"].is_array()) {
            throw ParseError("contingencies must be an array of '<bus>-<bus>' strings");
        }
        for (const auto& item : doc["contingencies"]) {
            if (!item.is_string()) {
                throw ParseError("contingencies must be an array of '<bus>-<bus>' strings");
            }
            config.contingencies.push_back(parse_line_token(item.get<std::string>()));
        }
    }
    return config;
}

Matrix build_laplacian(const GridCase& c) {
    const Eigen::Index n = static_cast<Eigen::Index>(c.bus_ids.size());
    Matrix L = Matrix::Zero(n, n);
    for (const auto& b : c.branches) {
        if (!(b.reactance > 0.0)) {
            throw AnalysisError("build_laplacian: branch " + std::to_string(b.from) + "-" +
                                std::to_string(b.to) + " has nonpositive reactance");
        }
        const int i = c.bus_position(b.from);
        const int j = c.bus_position(b.to);
        const double w = 1.0 / b.reactance;
        L(i, i) += w;
        L(j, j) += w;
        L(i, j) -= w;
        L(j, i) -= w;
    }
    return L;
}

Matrix kron_reduce(const Eigen::Ref<const Matrix>& L, const std::vector<int>& gen_indices,
                   const std::vector<int>& load_indices, const std::vector<int>& labels) {
    const Eigen::Index g = static_cast<Eigen::Index>(gen_indices.size());
    const Eigen::Index l = static_cast<Eigen::Index>(load_indices.size());
    if (g == 0) throw AnalysisError("kron_reduce: generator block is empty");
    if (l == 0) {
        Matrix Lgg(g, g);
        for (Eigen::Index a = 0; a < g; ++a)
            for (Eigen::Index b = 0; b < g; ++b) Lgg(a, b) = L(gen_indices[a], gen_indices[b]);
        return Lgg;
    }

    Matrix Lll(l, l), Llg(l, g), Lgg(g, g);
    for (Eigen::Index a = 0; a < l; ++a) {
        for (Eigen::Index b = 0; b < l; ++b) Lll(a, b) = L(load_indices[a], load_indices[b]);
        for (Eigen::Index b = 0; b < g; ++b) Llg(a, b) = L(load_indices[a], gen_indices[b]);
    }
    for (Eigen::Index a = 0; a < g; ++a)
        for (Eigen::Index b = 0; b < g; ++b) Lgg(a, b) = L(gen_indices[a], gen_indices[b]);

    // L_ll is invertible iff every load component reaches a generator.
    // BFS from generator-attached loads both detects and names islands.
    std::vector<char> reached(static_cast<size_t>(l), 0);
    std::deque<Eigen::Index> queue;
    for (Eigen::Index a = 0; a < l; ++a) {
        if (Llg.row(a).cwiseAbs().sum() > 0.0) {
            reached[static_cast<size_t>(a)] = 1;
            queue.push_back(a);
        }
    }
    while (!queue.empty()) {
        const Eigen::Index a = queue.front();
        queue.pop_front();
        for (Eigen::Index b = 0; b < l; ++b) {
            if (!reached[static_cast<size_t>(b)] && a != b && Lll(a, b) != 0.0) {
                reached[static_cast<size_t>(b)] = 1;
                queue.push_back(b);
            }
        }
    }
    std::string island;
    for (Eigen::Index a = 0; a < l; ++a) {
        if (!reached[static_cast<size_t>(a)]) {
            if (!island.empty()) island += ", ";
            const int pos = load_indices[a];
            island += std::to_string(labels.empty() ? pos : labels[static_cast<size_t>(pos)]);
        }
    }
    if (!island.empty()) {
        throw AnalysisError("kron_reduce: isolated load island {" + island +
                            "} makes the load block singular");
    }

    Matrix reduced = Lgg - Llg.transpose() * Lll.ldlt().solve(Llg);
    return ((reduced + reduced.transpose()) / 2.0).eval();
}

Matrix swing_state_matrix(const Eigen::Ref<const Matrix>& L_red, const Vector& inertia,
                          const Vector& damping) {
    const Eigen::Index g = L_red.rows();
    if (L_red.rows() != L_red.cols() || inertia.size() != g || damping.size() != g) {
        throw std::invalid_argument("swing_state_matrix: dimension mismatch");
    }
    if ((inertia.array() <= 0.0).any() || (damping.array() <= 0.0).any()) {
        throw std::invalid_argument("swing_state_matrix: inertia and damping must be positive");
    }
    Matrix A_c = Matrix::Zero(2 * g, 2 * g);
    A_c.topRightCorner(g, g) = Matrix::Identity(g, g);
    A_c.bottomLeftCorner(g, g) = -(inertia.cwiseInverse().asDiagonal() * L_red);
    A_c.bottomRightCorner(g, g) =
        (-(damping.array() / inertia.array())).matrix().asDiagonal();
    return A_c;
}

Matrix discretize(const Eigen::Ref<const Matrix>& A_c, double delta_t) {
    if (!(delta_t > 0.0)) {
        throw std::invalid_argument("discretize: delta_t must be positive");
    }
    if (A_c.rows() != A_c.cols()) {
        throw std::invalid_argument("discretize: matrix must be square");
    }
    return Matrix::Identity(A_c.rows(), A_c.cols()) + delta_t * A_c;
}

ReducedModel build_reduced_model(const GridCase& c, const DynamicsConfig& config) {
    ReducedModel m;
    m.L = build_laplacian(c);
    for (int pos = 0; pos < static_cast<int>(c.bus_ids.size()); ++pos) {
        if (c.is_generator(c.bus_ids[static_cast<size_t>(pos)])) {
            m.gen_indices.push_back(pos);
            m.gen_bus_ids.push_back(c.bus_ids[static_cast<size_t>(pos)]);
        } else {
            m.load_indices.push_back(pos);
        }
    }
    if (m.gen_indices.empty()) {
        throw AnalysisError("build_reduced_model: case has no generators");
    }
    m.L_red = kron_reduce(m.L, m.gen_indices, m.load_indices, c.bus_ids);

    const Eigen::Index g = static_cast<Eigen::Index>(m.gen_indices.size());
    m.inertia.resize(g);
    m.damping.resize(g);
    for (Eigen::Index k = 0; k < g; ++k) {
        const int bus = m.gen_bus_ids[static_cast<size_t>(k)];
        auto mi = config.inertia_by_bus.find(bus);
        auto di = config.damping_by_bus.find(bus);
        m.inertia(k) = mi == config.inertia_by_bus.end() ? config.inertia_default : mi->second;
        m.damping(k) = di == config.damping_by_bus.end() ? config.damping_default : di->second;
    }
    m.A_c = swing_state_matrix(m.L_red, m.inertia, m.damping);
    m.A_d = discretize(m.A_c, config.delta_t);
    m.delta_t = config.delta_t;
    return m;
}

OutageDirection outage_direction(const GridCase& c, const ReducedModel& model,
                                 std::pair<int, int> line) {
    const bool exists = std::any_of(c.branches.begin(), c.branches.end(), [&](const auto& b) {
        return (b.from == line.first && b.to == line.second) ||
               (b.from == line.second && b.to == line.first);
    });
    if (!exists) {
        throw AnalysisError("outage_direction: line " + std::to_string(line.first) + "-" +
                            std::to_string(line.second) + " not found in the case");
    }

    const Eigen::Index g = static_cast<Eigen::Index>(model.gen_indices.size());
    const Eigen::Index l = static_cast<Eigen::Index>(model.load_indices.size());
    Vector u_g = Vector::Zero(g), u_l = Vector::Zero(l);
    auto set_entry = [&](int bus, double value) {
        const int pos = c.bus_position(bus);
        auto gi = std::find(model.gen_indices.begin(), model.gen_indices.end(), pos);
        if (gi != model.gen_indices.end()) {
            u_g(gi - model.gen_indices.begin()) = value;
            return;
        }
        auto li = std::find(model.load_indices.begin(), model.load_indices.end(), pos);
        u_l(li - model.load_indices.begin()) = value;
    };
    set_entry(line.first, 1.0);
    set_entry(line.second, -1.0);

    Vector v = u_g;
    if (l > 0) {
        Matrix Lll(l, l), Llg(l, g);
        for (Eigen::Index a = 0; a < l; ++a) {
            for (Eigen::Index b = 0; b < l; ++b)
                Lll(a, b) = model.L(model.load_indices[a], model.load_indices[b]);
            for (Eigen::Index b = 0; b < g; ++b)
                Llg(a, b) = model.L(model.load_indices[a], model.gen_indices[b]);
        }
        v -= Llg.transpose() * Lll.ldlt().solve(u_l);
    }
    if (v.norm() <= 1e-12) {
        throw AnalysisError("outage_direction: line " + std::to_string(line.first) + "-" +
                            std::to_string(line.second) +
                            " is invisible in the reduced model (degenerate direction)");
    }

    OutageDirection dir;
    dir.B = Vector::Zero(2 * g);
    dir.B.tail(g) = -model.delta_t * (v.array() / model.inertia.array()).matrix();
    dir.C = RowVector::Zero(2 * g);
    dir.C.head(g) = v.transpose();
    return dir;
}

namespace {

/// Orthonormal basis of the hyperplane orthogonal to `psi`, via one
/// Householder reflector (deterministic, no pivoting).
Matrix householder_complement(const Vector& psi) {
    const Eigen::Index n = psi.size();
    Vector u = psi / psi.norm();
    Vector w = u;
    w(0) += (u(0) >= 0.0 ? 1.0 : -1.0);
    w /= w.norm();
    Matrix H = Matrix::Identity(n, n) - 2.0 * w * w.transpose();
    return H.rightCols(n - 1);
}

}  // namespace

QuotientMap grid_quotient(const ReducedModel& model) {
    const Eigen::Index g = static_cast<Eigen::Index>(model.gen_indices.size());
    Vector psi(2 * g);
    psi.head(g) = model.damping;
    psi.tail(g) = model.inertia;
    QuotientMap q;
    q.basis = householder_complement(psi);
    q.A = q.basis.transpose() * model.A_d * q.basis;
    return q;
}

GridBuild build_grid(const GridCase& c, const DynamicsConfig& config) {
    if (config.contingencies.empty()) {
        throw AnalysisError("build_grid: sensitivity analysis needs at least one contingency");
    }
    GridBuild build;
    build.model = build_reduced_model(c, config);
    const auto& m = build.model;

    QuotientMap quotient = grid_quotient(m);
    build.quotient_basis = std::move(quotient.basis);
    const Matrix& V = build.quotient_basis;
    Matrix A_q = std::move(quotient.A);

    const double radius = spectral_radius(A_q);
    if (!(radius < 1.0 - kLyapunovStabilityMargin)) {
        throw AnalysisError(
            "build_grid: discretized swing model is unstable (spectral radius " +
            std::to_string(radius) + "); raise damping or lower delta_t");
    }

    std::vector<LinkDirection> links;
    links.reserve(config.contingencies.size());
    for (const auto& line : config.contingencies) {
        OutageDirection dir = outage_direction(c, m, line);
        LinkDirection link;
        link.id = std::to_string(line.first) + "-" + std::to_string(line.second);
        link.B = V.transpose() * dir.B;
        link.C = dir.C * V;
        link.sigma = config.sigma;
        links.push_back(std::move(link));
    }
    build.net = network_from_directions(std::move(A_q), std::move(links));
    return build;
}

AssembledNetwork build_grid_network(const GridCase& c, const DynamicsConfig& config) {
    return build_grid(c, config).net;
}

}  // namespace gridsens
