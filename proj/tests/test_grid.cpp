#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "gridsens/errors.hpp"
#include "gridsens/grid.hpp"
#include "gridsens/sensitivity.hpp"
#include "support.hpp"

using namespace gridsens;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kTwoBusFixture = R"(% two-bus fixture
function mpc = case2
mpc.baseMVA = 100;
mpc.bus = [
    1 3 0 0 0 0 1 1 0 345 1 1.1 0.9;
    2 1 10 5 0 0 1 1 0 345 1 1.1 0.9;
];
mpc.gen = [
    1 50 0 100 -100 1 100 1 200 0;
];
mpc.branch = [
    1 2 0.01 0.1 0 250 250 250 0 0 1 -360 360;
];
)";

// generator - load - generator path, unit reactances
const char* kPathFixture = R"(
mpc.bus = [
    1 3 0 0 0 0 1 1 0 345 1 1.1 0.9;
    2 1 0 0 0 0 1 1 0 345 1 1.1 0.9;
    3 2 0 0 0 0 1 1 0 345 1 1.1 0.9;
];
mpc.gen = [
    1 0 0 0 0 1 100 1 0 0;
    3 0 0 0 0 1 100 1 0 0;
];
mpc.branch = [
    1 2 0 1.0 0 0 0 0 0 0 1 -360 360;
    2 3 0 1.0 0 0 0 0 0 0 1 -360 360;
];
)";

GridCase case39() {
    static GridCase c = parse_matpower(read_file(std::string(GRIDSENS_DATA_DIR) + "/case39.m"));
    return c;
}

DynamicsConfig bundled_config(const char* name) {
    return parse_dynamics_config(
        read_file(std::string(GRIDSENS_DATA_DIR) + "/" + name));
}

}  // namespace

TEST_CASE("parses the two-bus fixture") {
    GridCase c = parse_matpower(kTwoBusFixture);
    CHECK(c.bus_ids == std::vector<int>{1, 2});
    REQUIRE(c.branches.size() == 1);
    CHECK(c.branches[0].from == 1);
    CHECK(c.branches[0].to == 2);
    CHECK(c.branches[0].reactance == doctest::Approx(0.1));
    CHECK(c.gen_buses == std::vector<int>{1});
    CHECK(c.is_generator(1));
    CHECK_FALSE(c.is_generator(2));
}

TEST_CASE("bundled case39 has the expected shape") {
    GridCase c = case39();
    CHECK(c.bus_ids.size() == 39);
    CHECK(c.gen_buses.size() == 10);
    CHECK(c.branches.size() == 46);
    int loads = 0;
    for (int bus : c.bus_ids) {
        if (!c.is_generator(bus)) ++loads;
    }
    CHECK(loads == 29);
}

TEST_CASE("parse errors carry line numbers") {
    const char* dangling = "mpc.bus = [\n 1 1 0 0 0 0 1 1 0 345 1 1.1 0.9;\n];\nmpc.branch = [\n";
    try {
        parse_matpower(dangling);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("unterminated") != std::string::npos);
        CHECK(e.line() == 4);
    }

    const char* bad_token = "mpc.bus = [\n 1 1 zz;\n];\n";
    try {
        parse_matpower(bad_token);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("zz") != std::string::npos);
        CHECK(e.line() == 2);
    }

    const char* unknown_bus = R"(
mpc.bus = [
 1 1 0 0 0 0 1 1 0 345 1 1.1 0.9;
];
mpc.gen = [
 1 0 0 0 0 1 100 1 0 0;
];
mpc.branch = [
 1 7 0 0.1 0 0 0 0 0 0 1 -360 360;
];
)";
    CHECK_THROWS_AS(parse_matpower(unknown_bus), ParseError);
    CHECK_THROWS_AS(parse_matpower("mpc.bus = [\n];\n"), ParseError);  // missing tables
}

TEST_CASE("serialize -> parse reproduces identical tables") {
    GridCase c = case39();
    GridCase again = parse_matpower(serialize_matpower(c));
    REQUIRE(again.tables.size() == c.tables.size());
    for (size_t t = 0; t < c.tables.size(); ++t) {
        CHECK(again.tables[t].name == c.tables[t].name);
        REQUIRE(again.tables[t].rows.size() == c.tables[t].rows.size());
        for (size_t r = 0; r < c.tables[t].rows.size(); ++r) {
            CHECK(again.tables[t].rows[r] == c.tables[t].rows[r]);  // bitwise equality
        }
    }
}

TEST_CASE("Laplacian of the two-bus case") {
    GridCase c = parse_matpower(kTwoBusFixture);
    Matrix L = build_laplacian(c);
    Matrix expected(2, 2);
    expected << 10.0, -10.0,
                -10.0, 10.0;
    CHECK((L - expected).norm() < 1e-12);
}

TEST_CASE("Laplacian invariants hold for every parsed case") {
    for (const GridCase& c : {parse_matpower(kTwoBusFixture), case39()}) {
        Matrix L = build_laplacian(c);
        CHECK((L - L.transpose()).norm() < 1e-12);
        CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10);
        CHECK(testsup::min_eigenvalue(L) > -1e-10 * L.trace());
    }
}

TEST_CASE("disconnected components give a block-diagonal Laplacian") {
    const char* two_islands = R"(
mpc.bus = [
 1 3 0 0 0 0 1 1 0 345 1 1.1 0.9;
 2 1 0 0 0 0 1 1 0 345 1 1.1 0.9;
 3 2 0 0 0 0 1 1 0 345 1 1.1 0.9;
 4 1 0 0 0 0 1 1 0 345 1 1.1 0.9;
];
mpc.gen = [
 1 0 0 0 0 1 100 1 0 0;
 3 0 0 0 0 1 100 1 0 0;
];
mpc.branch = [
 1 2 0 0.5 0 0 0 0 0 0 1 -360 360;
 3 4 0 0.25 0 0 0 0 0 0 1 -360 360;
];
)";
    Matrix L = build_laplacian(parse_matpower(two_islands));
    CHECK(L(0, 2) == 0.0);
    CHECK(L(0, 3) == 0.0);
    CHECK(L(1, 2) == 0.0);
    CHECK(L(1, 3) == 0.0);
    CHECK(L(0, 1) == doctest::Approx(-2.0));
    CHECK(L(2, 3) == doctest::Approx(-4.0));
}

TEST_CASE("nonpositive reactance is rejected") {
    const char* bad = R"(
mpc.bus = [
 1 3 0 0 0 0 1 1 0 345 1 1.1 0.9;
 2 1 0 0 0 0 1 1 0 345 1 1.1 0.9;
];
mpc.gen = [
 1 0 0 0 0 1 100 1 0 0;
];
mpc.branch = [
 1 2 0 -0.1 0 0 0 0 0 0 1 -360 360;
];
)";
    CHECK_THROWS_AS(build_laplacian(parse_matpower(bad)), AnalysisError);
}

TEST_CASE("Kron reduction with no loads is the generator block itself") {
    GridCase c = parse_matpower(kPathFixture);
    Matrix L = build_laplacian(c);
    Matrix full = kron_reduce(L, {0, 1, 2}, {});
    CHECK((full - L).norm() < 1e-14);
}

TEST_CASE("Kron reduction of a g-l-g path is the series combination") {
    GridCase c = parse_matpower(kPathFixture);
    Matrix L = build_laplacian(c);
    // generators at positions 0, 2; load at position 1
    Matrix red = kron_reduce(L, {0, 2}, {1});
    Matrix expected(2, 2);
    expected << 0.5, -0.5,
                -0.5, 0.5;
    CHECK((red - expected).norm() < 1e-12);
}

TEST_CASE("Kron reduction preserves symmetry, zero row sums and PSD on case39") {
    GridCase c = case39();
    DynamicsConfig config;
    ReducedModel m = build_reduced_model(c, config);
    CHECK(m.L_red.rows() == 10);
    CHECK((m.L_red - m.L_red.transpose()).norm() < 1e-10);
    CHECK(m.L_red.rowwise().sum().cwiseAbs().maxCoeff() < 1e-8);
    CHECK(testsup::min_eigenvalue(m.L_red) > -1e-8 * m.L_red.trace());
}

TEST_CASE("two-stage load elimination equals one-stage reduction") {
    GridCase c = case39();
    DynamicsConfig config;
    ReducedModel m = build_reduced_model(c, config);
    // stage 1: eliminate the odd-position loads; stage 2: the rest
    std::vector<int> first, second;
    for (size_t i = 0; i < m.load_indices.size(); ++i) {
        (i % 2 ? first : second).push_back(m.load_indices[i]);
    }
    std::vector<int> keep = m.gen_indices;
    keep.insert(keep.end(), second.begin(), second.end());
    std::sort(keep.begin(), keep.end());
    Matrix stage1 = kron_reduce(m.L, keep, first);
    // map original indices to positions inside stage1
    std::vector<int> gen_pos, load_pos;
    for (size_t i = 0; i < keep.size(); ++i) {
        if (std::find(m.gen_indices.begin(), m.gen_indices.end(), keep[i]) !=
            m.gen_indices.end()) {
            gen_pos.push_back(static_cast<int>(i));
        } else {
            load_pos.push_back(static_cast<int>(i));
        }
    }
    Matrix stage2 = kron_reduce(stage1, gen_pos, load_pos);
    CHECK((stage2 - m.L_red).norm() <= 1e-10 * std::max(1.0, m.L_red.norm()));
}

TEST_CASE("isolated load islands are reported with bus ids") {
    const char* island = R"(
mpc.bus = [
 1 3 0 0 0 0 1 1 0 345 1 1.1 0.9;
 2 1 0 0 0 0 1 1 0 345 1 1.1 0.9;
 7 1 0 0 0 0 1 1 0 345 1 1.1 0.9;
 8 1 0 0 0 0 1 1 0 345 1 1.1 0.9;
];
mpc.gen = [
 1 0 0 0 0 1 100 1 0 0;
];
mpc.branch = [
 1 2 0 0.5 0 0 0 0 0 0 1 -360 360;
 7 8 0 0.5 0 0 0 0 0 0 1 -360 360;
];
)";
    GridCase c = parse_matpower(island);
    DynamicsConfig config;
    try {
        build_reduced_model(c, config);
        FAIL("expected AnalysisError");
    } catch (const AnalysisError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("island") != std::string::npos);
        CHECK(msg.find('7') != std::string::npos);
        CHECK(msg.find('8') != std::string::npos);
    }
}

TEST_CASE("swing state matrix block structure") {
    Matrix zero = Matrix::Zero(2, 2);
    Matrix A_c = swing_state_matrix(zero, Vector::Ones(2), Vector::Ones(2));
    Matrix expected = Matrix::Zero(4, 4);
    expected.topRightCorner(2, 2) = Matrix::Identity(2, 2);
    expected.bottomRightCorner(2, 2) = -Matrix::Identity(2, 2);
    CHECK((A_c - expected).norm() < 1e-15);

    Matrix single = swing_state_matrix(Matrix::Zero(1, 1), Vector::Constant(1, 2.0),
                                       Vector::Constant(1, 4.0));
    Matrix expected1(2, 2);
    expected1 << 0.0, 1.0,
                 0.0, -2.0;
    CHECK((single - expected1).norm() < 1e-15);

    CHECK_THROWS_AS(swing_state_matrix(zero, Vector::Zero(2), Vector::Ones(2)),
                    std::invalid_argument);
}

TEST_CASE("swing eigenvalues have nonpositive real parts") {
    GridCase c = case39();
    ReducedModel m = build_reduced_model(c, DynamicsConfig{});
    Spectrum s = eigenvalues(m.A_c);
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        CHECK(s.eigenvalues(i).real() <= 1e-10);
    }
}

TEST_CASE("forward Euler discretization") {
    CHECK((discretize(Matrix::Zero(3, 3), 0.1) - Matrix::Identity(3, 3)).norm() == 0.0);
    Matrix a(1, 1);
    a << -2.0;
    CHECK(discretize(a, 0.01)(0, 0) == doctest::Approx(0.98));
    CHECK_THROWS_AS(discretize(a, 0.0), std::invalid_argument);
}

TEST_CASE("outage direction between generator buses with no loads") {
    GridCase c = parse_matpower(R"(
mpc.bus = [
 1 3 0 0 0 0 1 1 0 345 1 1.1 0.9;
 2 2 0 0 0 0 1 1 0 345 1 1.1 0.9;
];
mpc.gen = [
 1 0 0 0 0 1 100 1 0 0;
 2 0 0 0 0 1 100 1 0 0;
];
mpc.branch = [
 1 2 0 0.5 0 0 0 0 0 0 1 -360 360;
];
)");
    ReducedModel m = build_reduced_model(c, DynamicsConfig{});
    OutageDirection dir = outage_direction(c, m, {1, 2});
    RowVector expectedC(4);
    expectedC << 1.0, -1.0, 0.0, 0.0;
    CHECK((dir.C - expectedC).norm() < 1e-12);
    Vector expectedB(4);
    expectedB << 0.0, 0.0, -0.01, 0.01;
    CHECK((dir.B - expectedB).norm() < 1e-12);

    CHECK_THROWS_AS(outage_direction(c, m, {1, 7}), AnalysisError);
}

TEST_CASE("rank-one sensitivity matches central finite differences") {
    GridCase c = case39();
    DynamicsConfig config;
    ReducedModel m = build_reduced_model(c, config);

    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<size_t> pick(0, c.branches.size() - 1);
    for (int trial = 0; trial < 10; ++trial) {
        const BranchRecord& line = c.branches[pick(rng)];
        OutageDirection dir = outage_direction(c, m, {line.from, line.to});
        const Eigen::Index g = m.L_red.rows();
        Vector v = dir.C.head(g).transpose();
        Matrix vvT = v * v.transpose();

        const double b0 = 1.0 / line.reactance;
        const double eps = 1e-6 * b0;
        auto lred_at = [&](double db) {
            GridCase perturbed = c;
            for (auto& br : perturbed.branches) {
                if (br.from == line.from && br.to == line.to) {
                    br.reactance = 1.0 / (b0 + db);
                    break;
                }
            }
            Matrix L = build_laplacian(perturbed);
            return kron_reduce(L, m.gen_indices, m.load_indices);
        };
        Matrix fd = (lred_at(eps) - lred_at(-eps)) / (2.0 * eps);
        CHECK((fd - vvT).norm() <= 1e-6 * vvT.norm());
    }
}

TEST_CASE("grid network on the green contingency set") {
    GridCase c = case39();
    DynamicsConfig config = bundled_config("case39_green.json");
    GridBuild build = build_grid(c, config);
    // ten generators, two states each, minus the uniform-angle mode
    CHECK(build.net.dim == 19);
    REQUIRE(build.net.links.size() == 4);
    CHECK(build.net.links[0].id == "37-25");
    CHECK(spectral_radius(build.net.A) < 1.0);

    // quotient preserves every Markov parameter of each direction
    for (const auto& line : config.contingencies) {
        OutageDirection dir = outage_direction(c, build.model, line);
        const std::string id = std::to_string(line.first) + "-" + std::to_string(line.second);
        const auto link = std::find_if(build.net.links.begin(), build.net.links.end(),
                                       [&](const auto& l) { return l.id == id; });
        REQUIRE(link != build.net.links.end());
        Vector full = dir.B;
        Vector reduced = link->B;
        for (int t = 0; t < 6; ++t) {
            const double markov_full = dir.C * full;
            const double markov_reduced = link->C * reduced;
            CHECK(markov_full ==
                  doctest::Approx(markov_reduced).epsilon(1e-10).scale(std::abs(markov_full) + 1.0));
            full = build.model.A_d * full;
            reduced = build.net.A * reduced;
        }
    }
}

TEST_CASE("grid build failure modes") {
    GridCase c = case39();
    DynamicsConfig empty;
    CHECK_THROWS_AS(build_grid(c, empty), AnalysisError);

    DynamicsConfig unstable = bundled_config("case39_green.json");
    unstable.delta_t = 10.0;
    try {
        build_grid(c, unstable);
        FAIL("expected AnalysisError");
    } catch (const AnalysisError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("raise damping or lower delta_t") != std::string::npos);
    }
}

TEST_CASE("dynamics config parsing") {
    DynamicsConfig c = parse_dynamics_config(
        R"({"delta_t": 0.02, "inertia": 2.5, "damping": {"30": 1.5}, "sigma": 0.7,
            "contingencies": ["37-25", "1-39"]})");
    CHECK(c.delta_t == doctest::Approx(0.02));
    CHECK(c.inertia_default == doctest::Approx(2.5));
    CHECK(c.damping_by_bus.at(30) == doctest::Approx(1.5));
    CHECK(c.sigma == doctest::Approx(0.7));
    REQUIRE(c.contingencies.size() == 2);
    CHECK(c.contingencies[0] == std::pair<int, int>{37, 25});

    CHECK_THROWS_AS(parse_dynamics_config("{"), ParseError);
    CHECK_THROWS_AS(parse_dynamics_config(R"({"contingencies": ["x"]})"), ParseError);
    CHECK_THROWS_AS(parse_dynamics_config(R"({"delta_t": "fast"})"), ParseError);
}

TEST_CASE("bundled green and red sets reproduce the ranking contrast") {
    GridCase c = case39();
    SensitivityReport green =
        analyze_sensitivity(build_grid_network(c, bundled_config("case39_green.json")));
    SensitivityReport red =
        analyze_sensitivity(build_grid_network(c, bundled_config("case39_red.json")));

    CHECK(green.ranking == rank_by_index(green.S, green.ids));
    CHECK(red.ranking != rank_by_index(red.S, red.ids));
    CHECK(red.interaction >= 10.0 * green.interaction);
}
