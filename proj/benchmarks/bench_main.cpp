#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "subopt/graph.hpp"
#include "subopt/linalg.hpp"
#include "subopt/network.hpp"
#include "subopt/sim.hpp"
#include "subopt/synth.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd random_hurwitz(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = u(rng);
  a -= (subopt::linalg::spectrum(a).max_real + 0.5) * MatrixXd::Identity(n, n);
  return a;
}

subopt::net::MasProblem line4_problem() {
  VectorXd x0(4);
  x0 << 0.1, 0.2, 0.5, -0.5;
  return subopt::net::MasProblem{
      MatrixXd::Zero(1, 1),
      std::vector<MatrixXd>(4, MatrixXd::Ones(1, 1)),
      MatrixXd::Ones(1, 1),
      MatrixXd::Ones(1, 1),
      subopt::graph::Topology(4, {{1, 2}, {2, 3}, {3, 4}}),
      x0};
}

subopt::net::MasProblem rollers_problem() {
  MatrixXd a(3, 3);
  a << 0, 1, 0, 0, -0.01, 0.2, 0, 0, -125;
  std::vector<MatrixXd> b;
  for (double g : {20.0, 18.0, 16.0, 14.0, 12.0}) {
    MatrixXd bi(3, 1);
    bi << 0, 0, g;
    b.push_back(bi);
  }
  VectorXd x0(15);
  x0 << 0.02, 0, 0.01, 0.01, 0.01, -0.01, 0.05, 0.01, 0.01, 0.04, 0.02, 0.02,
      0.07, 0, 0;
  return subopt::net::MasProblem{
      a,
      std::move(b),
      10.0 * MatrixXd::Identity(3, 3),
      0.001 * MatrixXd::Identity(1, 1),
      subopt::graph::Topology(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}}),
      std::move(x0)};
}

void BM_LyapunovSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MatrixXd a = random_hurwitz(n, 7);
  const MatrixXd w = MatrixXd::Identity(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(subopt::linalg::lyap_solve(a, w));
  }
}
BENCHMARK(BM_LyapunovSolve)->Arg(4)->Arg(12)->Arg(24);

void BM_RiccatiSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MatrixXd a = random_hurwitz(n, 11);
  const MatrixXd b = MatrixXd::Identity(n, n).leftCols(1);
  const MatrixXd q = MatrixXd::Identity(n, n);
  const MatrixXd r = MatrixXd::Identity(1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(subopt::linalg::care_solve(a, b, q, r));
  }
}
BENCHMARK(BM_RiccatiSolve)->Arg(2)->Arg(6);

void BM_DesignProtocolLine4(benchmark::State& state) {
  const auto p = line4_problem();
  for (auto _ : state) {
    benchmark::DoNotOptimize(subopt::synth::design_protocol(p));
  }
}
BENCHMARK(BM_DesignProtocolLine4)->Unit(benchmark::kMillisecond);

void BM_SimulateRollers(benchmark::State& state) {
  const auto p = rollers_problem();
  const auto res = subopt::synth::design_protocol(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(subopt::sim::simulate(p, res.kx, 20.0, 0.001));
  }
}
BENCHMARK(BM_SimulateRollers)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
