#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "gridsens/builtin.hpp"
#include "gridsens/grid.hpp"
#include "gridsens/sensitivity.hpp"
#include "gridsens/stability.hpp"

using namespace gridsens;

namespace {

Matrix random_stable(std::mt19937_64& rng, int n, double radius) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = dist(rng);
    return A * (radius / spectral_radius(A));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void BM_LyapunovDirect(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const int n = static_cast<int>(state.range(0));
    Matrix A = random_stable(rng, n, 0.9);
    Matrix Q = Matrix::Identity(n, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_discrete_lyapunov_direct(A, Q));
    }
}
BENCHMARK(BM_LyapunovDirect)->Arg(8)->Arg(16)->Arg(32);

void BM_LyapunovDoubling(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const int n = static_cast<int>(state.range(0));
    Matrix A = random_stable(rng, n, 0.9);
    Matrix Q = Matrix::Identity(n, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_discrete_lyapunov_doubling(A, Q));
    }
}
BENCHMARK(BM_LyapunovDoubling)->Arg(32)->Arg(64)->Arg(128);

void BM_MssRadiusDense(benchmark::State& state) {
    AssembledNetwork net = builtin_example(1);
    SigmaAssignment sig{0.08, 0.08};
    for (auto _ : state) {
        benchmark::DoNotOptimize(mss_spectral_radius(net, sig));
    }
}
BENCHMARK(BM_MssRadiusDense);

void BM_MssRadiusPower(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const int n = 40;
    Matrix G = random_stable(rng, n, 0.8);
    Matrix A = ((G + G.transpose()) / 2.0).eval();
    A *= 0.8 / spectral_radius(A);
    std::normal_distribution<double> dist(0.0, 1.0);
    LinkDirection d;
    d.id = "1";
    d.B = Vector::NullaryExpr(n, [&](Eigen::Index) { return dist(rng); });
    d.C = RowVector::NullaryExpr(n, [&](Eigen::Index) { return dist(rng); });
    AssembledNetwork net = network_from_directions(A, {d});
    SigmaAssignment sig{0.05};
    for (auto _ : state) {
        benchmark::DoNotOptimize(mss_spectral_radius_power(net, sig));
    }
}
BENCHMARK(BM_MssRadiusPower);

void BM_FeasibilityBoundary(benchmark::State& state) {
    AssembledNetwork net = builtin_example(1);
    const int angles = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(feasibility_boundary(net, angles, 1e-6));
    }
}
BENCHMARK(BM_FeasibilityBoundary)->Arg(33)->Arg(181);

void BM_Case39Analysis(benchmark::State& state) {
    GridCase c = parse_matpower(read_file(std::string(GRIDSENS_DATA_DIR) + "/case39.m"));
    DynamicsConfig config = parse_dynamics_config(
        read_file(std::string(GRIDSENS_DATA_DIR) + "/case39_green.json"));
    for (auto _ : state) {
        benchmark::DoNotOptimize(analyze_sensitivity(build_grid_network(c, config)));
    }
}
BENCHMARK(BM_Case39Analysis);

void BM_MonteCarloGrowth(benchmark::State& state) {
    AssembledNetwork net = builtin_example(1);
    SigmaAssignment sig{0.05, 0.05};
    for (auto _ : state) {
        benchmark::DoNotOptimize(monte_carlo_growth(net, sig, 200, 60, 11));
    }
}
BENCHMARK(BM_MonteCarloGrowth);

}  // namespace

BENCHMARK_MAIN();
