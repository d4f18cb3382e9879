#pragma once

#include <vector>

#include <Eigen/Dense>

#include "subopt/errors.hpp"
#include "subopt/graph.hpp"

namespace subopt::net {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Multiagent plant: shared drift A (n x n), per-agent input matrices B_i
// (n x m, full column rank, m <= n), pairwise state weight qu (PSD) and input
// weight ru (PD), an interaction graph, and the stacked initial state x0.
struct MasProblem {
  MatrixXd a;
  std::vector<MatrixXd> b;
  MatrixXd qu;
  MatrixXd ru;
  graph::Topology topology;
  VectorXd x0;

  int n() const { return static_cast<int>(a.rows()); }
  int m() const { return b.empty() ? 0 : static_cast<int>(b.front().cols()); }
  int n_agents() const { return topology.n_agents(); }

  // Throws std::invalid_argument when any dimension or definiteness
  // requirement fails.
  void validate() const;
};

// Regulation form in consecutive-difference errors e_i = x_i - x_{i+1}.
struct ErrorSystem {
  MatrixXd atil;   // I_{N-1} (x) A
  MatrixXd btil;   // block bidiagonal of B_i, -B_{i+1}
  MatrixXd qtil;   // error-state weight
  MatrixXd rhat;   // I_N (x) ru
  VectorXd e0;     // stacked initial errors
  double qtil_discard_norm = 0.0;  // magnitude of the dropped zero block
};

ErrorSystem build_error_system(const MasProblem& p);

// Converts a stacked-state gain (mN x nN, diffusive) to the error-coordinate
// gain (mN x n(N-1)). Throws StructureError when any agent row-block sum is
// nonzero (the law is not diffusive).
MatrixXd ke_from_kx(const MatrixXd& kx, int n, int m, int n_agents);

// Inverse map. Throws StructureError naming the offending blocks when the
// resulting stacked-state gain violates the sparsity pattern.
MatrixXd kx_from_ke(const MatrixXd& ke, const graph::SparsityPattern& pattern,
                    int n, int m);

// atil + btil * ke.
MatrixXd closed_loop_error_matrix(const ErrorSystem& es, const MatrixXd& ke);

}  // namespace subopt::net
