#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace subopt::graph {

using Eigen::MatrixXd;

// Undirected connected interaction graph on agents 1..n_agents.
// Edges are stored as (i, j) with 1 <= i < j <= n_agents.
class Topology {
 public:
  Topology(int n_agents, std::vector<std::pair<int, int>> edges);

  int n_agents() const { return n_agents_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  // Sorted neighbor list of agent i (1-based).
  std::vector<int> neighbors(int i) const;

  bool adjacent(int i, int j) const;

 private:
  int n_agents_;
  std::vector<std::pair<int, int>> edges_;
};

// Allowed block support for a distributed gain: (i, j) blocks may be nonzero
// only when j == i or j is a neighbor of i.
struct SparsityPattern {
  int n_agents = 0;
  std::vector<std::vector<bool>> allowed;  // [i-1][j-1]
};

SparsityPattern sparsity_pattern(const Topology& t);

// Graph Laplacian, assembled over integers (exact L * ones = 0).
MatrixXd laplacian(const Topology& t);

// Block upper-triangular change of coordinates: the N x N upper triangle of
// ones, Kronecker-multiplied with I_n. Its first N-1 block columns map the
// consecutive-difference errors back into stacked states; the last block
// column is ones (x) I_n.
MatrixXd delta(int n, int n_agents);

std::vector<int> neighbors(const Topology& t, int i);

}  // namespace subopt::graph
