#include "subopt/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "subopt/errors.hpp"
#include "subopt/graph.hpp"
#include "subopt/linalg.hpp"
#include "subopt/network.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace subopt;

net::MasProblem scalar_integrators(graph::Topology t, VectorXd x0,
                                   double a = 0.0) {
  const int n_agents = t.n_agents();
  MatrixXd am(1, 1);
  am << a;
  return net::MasProblem{std::move(am),
                         std::vector<MatrixXd>(static_cast<size_t>(n_agents),
                                               MatrixXd::Ones(1, 1)),
                         MatrixXd::Ones(1, 1),
                         MatrixXd::Ones(1, 1),
                         std::move(t),
                         std::move(x0)};
}

net::MasProblem pair_problem() {
  VectorXd x0(2);
  x0 << 1.0, -1.0;
  return scalar_integrators(graph::Topology(2, {{1, 2}}), std::move(x0));
}

net::MasProblem line4_problem() {
  VectorXd x0(4);
  x0 << 0.1, 0.2, 0.5, -0.5;
  return scalar_integrators(graph::Topology(4, {{1, 2}, {2, 3}, {3, 4}}),
                            std::move(x0));
}

TEST(Simulate, FourthOrderConvergence) {
  // For the pair under kx = -L/2 the difference mode decays as e^{-t}, so
  // x_1(T) = e^{-T} exactly; halving dt must cut the error about 16x.
  const auto p = pair_problem();
  const MatrixXd kx = -0.5 * graph::laplacian(p.topology);
  const double T = 2.0;
  const double exact = std::exp(-T);
  const auto coarse = sim::simulate(p, kx, T, 0.02);
  const auto fine = sim::simulate(p, kx, T, 0.01);
  const double e_coarse = std::abs(coarse.x(coarse.x.rows() - 1, 0) - exact);
  const double e_fine = std::abs(fine.x(fine.x.rows() - 1, 0) - exact);
  ASSERT_GT(e_coarse, 1e-14);
  ASSERT_GT(e_fine, 1e-15);
  const double ratio = e_coarse / e_fine;
  EXPECT_GT(ratio, 13.0);
  EXPECT_LT(ratio, 19.0);
}

TEST(Simulate, GridShape) {
  const auto p = pair_problem();
  const MatrixXd kx = -0.5 * graph::laplacian(p.topology);
  const auto traj = sim::simulate(p, kx, 1.0, 0.01);
  ASSERT_EQ(traj.x.rows(), 101);
  ASSERT_EQ(traj.u.rows(), 101);
  EXPECT_EQ(traj.x.cols(), 2);
  EXPECT_EQ(traj.u.cols(), 2);
  EXPECT_EQ(traj.t.front(), 0.0);
  EXPECT_NEAR(traj.t.back(), 1.0, 1e-12);

  // A dt that does not divide T snaps the grid so the last sample lands on T.
  const auto odd = sim::simulate(p, kx, 1.0, 0.003);
  ASSERT_EQ(odd.x.rows(), 335);
  EXPECT_NEAR(odd.t.back(), 1.0, 1e-12);
}

TEST(Simulate, RejectsCoarseStep) {
  const auto p = pair_problem();
  const MatrixXd kx = -0.5 * graph::laplacian(p.topology);
  EXPECT_THROW(sim::simulate(p, kx, 1.0, 0.02), std::invalid_argument);
  EXPECT_THROW(sim::simulate(p, kx, -1.0, 0.001), std::invalid_argument);
  EXPECT_THROW(sim::simulate(p, MatrixXd::Zero(3, 3), 1.0, 0.01),
               std::invalid_argument);
}

TEST(Simulate, ReportsDivergence) {
  VectorXd x0(2);
  x0 << 1.0, 0.9;
  auto p = scalar_integrators(graph::Topology(2, {{1, 2}}), std::move(x0),
                              1.0);
  const MatrixXd kx = MatrixXd::Zero(2, 2);
  EXPECT_THROW(sim::simulate(p, kx, 21.0, 0.2), NumericalError);
}

TEST(Quadrature, ConstantIntegrandIsExact) {
  // With a zero gain on integrators the state never moves; the pair at
  // (1, -1) pays rate (x_1 - x_2)^2 = 4 from both agent sums halved.
  const auto p = pair_problem();
  const auto traj = sim::simulate(p, MatrixXd::Zero(2, 2), 1.0, 0.01);
  EXPECT_NEAR(sim::quadrature_cost(p, traj), 4.0, 1e-12);
}

TEST(Quadrature, NondecreasingInHorizon) {
  const auto p = line4_problem();
  const MatrixXd kx = -0.3 * graph::laplacian(p.topology);
  const auto shorter = sim::simulate(p, kx, 5.0, 0.05);
  const auto longer = sim::simulate(p, kx, 10.0, 0.05);
  EXPECT_GE(sim::quadrature_cost(p, longer),
            sim::quadrature_cost(p, shorter) - 1e-12);
}

TEST(ConsensusMetric, PairwiseGoldens) {
  VectorXd a(3);
  a << 1.0, 2.0, 4.0;
  EXPECT_NEAR(sim::consensus_metric(a, 1, 3), 3.0, 1e-15);
  VectorXd b(4);
  b << 0.0, 0.0, 3.0, 4.0;
  EXPECT_NEAR(sim::consensus_metric(b, 2, 2), 5.0, 1e-15);
  VectorXd c(2);
  c << 7.0, 7.0;
  EXPECT_NEAR(sim::consensus_metric(c, 1, 2), 0.0, 0.0);
}

TEST(Report, MetricsAndTaillessDefault) {
  const auto p = line4_problem();
  const MatrixXd kx = -0.3 * graph::laplacian(p.topology);
  const auto traj = sim::simulate(p, kx, 40.0, 0.01);
  const auto rep = sim::report(p, traj);
  EXPECT_NEAR(rep.metric_initial, 1.0, 1e-15);
  EXPECT_LT(rep.metric_final, 0.01);
  EXPECT_LT(rep.metric_final, rep.metric_initial);
  EXPECT_EQ(rep.tail, 0.0);
  EXPECT_GT(rep.j_quad, 0.0);
}

TEST(Report, QuadraturePlusTailMatchesLyapunovCost) {
  const auto p = line4_problem();
  const MatrixXd kx = -0.3 * graph::laplacian(p.topology);
  const auto es = net::build_error_system(p);
  const MatrixXd ke = net::ke_from_kx(kx, 1, 1, 4);
  const MatrixXd acl = net::closed_loop_error_matrix(es, ke);
  const MatrixXd y = linalg::lyap_solve(
      acl, es.qtil + ke.transpose() * es.rhat * ke);
  const double expected = es.e0.dot(y * es.e0);

  const auto traj = sim::simulate(p, kx, 40.0, 0.002);
  const auto rep = sim::report(p, traj, &y);
  EXPECT_GT(rep.tail, 0.0);
  EXPECT_NEAR(rep.j_quad + rep.tail, expected, 1e-6 * expected);
}

TEST(Csv, HeaderAndFirstSampleBytes) {
  const auto p = pair_problem();
  const MatrixXd kx = -0.5 * graph::laplacian(p.topology);
  const auto traj = sim::simulate(p, kx, 1.0, 0.01);
  const std::string path =
      testing::TempDir() + "/sim_pair.csv";
  sim::write_csv(traj, 1, 1, 2, path);

  std::ifstream in(path);
  ASSERT_TRUE(in.good());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "t,x_1_1,x_2_1,u_1_1,u_2_1");
  EXPECT_EQ(first, "0,1,-1,-1,1");
  // One line per sample plus the header.
  long lines = 2;
  std::string rest;
  while (std::getline(in, rest)) ++lines;
  EXPECT_EQ(lines, 102);
  std::remove(path.c_str());
}

}  // namespace
