#include "subopt/structure.hpp"

#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "subopt/graph.hpp"
#include "subopt/network.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace subopt;

net::MasProblem scalar_integrators(graph::Topology t) {
  const int na = t.n_agents();
  return net::MasProblem{MatrixXd::Zero(1, 1),
                         std::vector<MatrixXd>(static_cast<size_t>(na),
                                               MatrixXd::Ones(1, 1)),
                         MatrixXd::Ones(1, 1),
                         MatrixXd::Ones(1, 1),
                         std::move(t),
                         VectorXd::Zero(na)};
}

TEST(VecSym, RoundTripAndOrdering) {
  EXPECT_EQ(structure::sym_dim(3), 6);
  MatrixXd p(3, 3);
  p << 1, 2, 4, 2, 3, 5, 4, 5, 6;
  VectorXd v = structure::vec_sym(p);
  ASSERT_EQ(v.size(), 6);
  // Upper triangle column-major: (0,0), (0,1), (1,1), (0,2), (1,2), (2,2).
  VectorXd expect(6);
  expect << 1, 2, 3, 4, 5, 6;
  EXPECT_NEAR((v - expect).cwiseAbs().maxCoeff(), 0.0, 0.0);
  EXPECT_NEAR((structure::unvec_sym(v, 3) - p).cwiseAbs().maxCoeff(), 0.0,
              0.0);
}

TEST(AdmissibleSubspace, LineAgentDimensions) {
  const graph::Topology t(4, {{1, 2}, {2, 3}, {3, 4}});
  const auto sub = structure::admissible_subspace(t, 1, 1);
  EXPECT_EQ(sub.rows, 4);
  EXPECT_EQ(sub.cols, 3);
  EXPECT_EQ(sub.agent_dims, (std::vector<int>{1, 2, 2, 1}));
  const int total = 1 + 2 + 2 + 1;
  EXPECT_EQ(sub.basis.cols(), total);
  EXPECT_EQ(sub.basis.rows(), 12);
  EXPECT_EQ(sub.annihilator.rows(), 12 - total);
  // Basis and annihilator are mutually orthogonal.
  EXPECT_LT((sub.annihilator * sub.basis).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AdmissibleSubspace, ValidatesKnownGains) {
  const graph::Topology line(4, {{1, 2}, {2, 3}, {3, 4}});
  const auto sub = structure::admissible_subspace(line, 1, 1);
  MatrixXd kx = -0.3 * graph::laplacian(line);
  MatrixXd ke = net::ke_from_kx(kx, 1, 1, 4);
  EXPECT_TRUE(structure::validate_gain_structure(sub, ke));

  // The same error gain built on the ring uses the (1, 4) link and is not
  // realizable on the line.
  const graph::Topology ring(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}});
  MatrixXd ke_ring =
      net::ke_from_kx(-0.3 * graph::laplacian(ring), 1, 1, 4);
  EXPECT_FALSE(structure::validate_gain_structure(sub, ke_ring));
}

// Every symmetric P satisfying the derived equalities must induce an
// admissible gain; for the line that forces P diagonal.
TEST(PConstraints, LineForcesDiagonalP) {
  auto p = scalar_integrators(graph::Topology(4, {{1, 2}, {2, 3}, {3, 4}}));
  const auto es = net::build_error_system(p);
  const auto sub = structure::admissible_subspace(p.topology, 1, 1);
  const auto pcon = structure::derive_P_constraints(es, sub);
  ASSERT_EQ(pcon.dim, 3);
  ASSERT_EQ(pcon.c.cols(), 6);
  // Kernel vectors represent admissible P; entries (0,1), (0,2), (1,2) sit at
  // vec_sym positions 1, 3, 4 and must vanish.
  Eigen::FullPivLU<MatrixXd> lu(pcon.c);
  MatrixXd ker = lu.kernel();
  for (int c = 0; c < ker.cols(); ++c) {
    EXPECT_LT(std::abs(ker(1, c)), 1e-12);
    EXPECT_LT(std::abs(ker(3, c)), 1e-12);
    EXPECT_LT(std::abs(ker(4, c)), 1e-12);
  }
  EXPECT_EQ(ker.cols(), 3);
}

// Four agents, all pairs linked except (1, 3): the first two off-diagonal
// entries of P are tied together.
TEST(PConstraints, MeshTiesP12ToP13) {
  auto p = scalar_integrators(
      graph::Topology(4, {{1, 2}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}));
  const auto es = net::build_error_system(p);
  const auto sub = structure::admissible_subspace(p.topology, 1, 1);
  const auto pcon = structure::derive_P_constraints(es, sub);
  Eigen::FullPivLU<MatrixXd> lu(pcon.c);
  MatrixXd ker = lu.kernel();
  ASSERT_GT(ker.cols(), 0);
  for (int c = 0; c < ker.cols(); ++c) {
    EXPECT_NEAR(ker(1, c), ker(3, c), 1e-12);
  }
}

TEST(PConstraints, PrintedRingSolutionIsAdmissible) {
  auto p = scalar_integrators(
      graph::Topology(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}}));
  const auto es = net::build_error_system(p);
  const auto sub = structure::admissible_subspace(p.topology, 1, 1);
  const auto pcon = structure::derive_P_constraints(es, sub);
  MatrixXd phat(3, 3);
  phat << 0.59, 0.43, 0.43, 0.43, 0.70, 0.43, 0.43, 0.43, 0.59;
  const VectorXd residual = pcon.c * structure::vec_sym(phat);
  EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-12);
  // And the induced gain is realizable on the ring.
  MatrixXd ke = -es.rhat.llt().solve(es.btil.transpose() * phat);
  EXPECT_TRUE(structure::validate_gain_structure(sub, ke));
}

TEST(PConstraints, FullRowRank) {
  auto p = scalar_integrators(graph::Topology(4, {{1, 2}, {2, 3}, {3, 4}}));
  const auto es = net::build_error_system(p);
  const auto sub = structure::admissible_subspace(p.topology, 1, 1);
  const auto pcon = structure::derive_P_constraints(es, sub);
  Eigen::FullPivLU<MatrixXd> lu(pcon.c);
  EXPECT_EQ(lu.rank(), pcon.c.rows());
}

}  // namespace
