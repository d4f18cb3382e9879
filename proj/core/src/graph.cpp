#include "subopt/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace subopt::graph {

Topology::Topology(int n_agents, std::vector<std::pair<int, int>> edges)
    : n_agents_(n_agents), edges_(std::move(edges)) {
  if (n_agents_ < 2) {
    throw std::invalid_argument("Topology: need at least two agents");
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& [i, j] : edges_) {
    if (i < 1 || j < 1 || i > n_agents_ || j > n_agents_) {
      throw std::invalid_argument("Topology: edge endpoint out of range");
    }
    if (i >= j) {
      throw std::invalid_argument(
          "Topology: edges must satisfy i < j (no self loops)");
    }
    if (!seen.insert({i, j}).second) {
      throw std::invalid_argument("Topology: duplicate edge (" +
                                  std::to_string(i) + "," + std::to_string(j) +
                                  ")");
    }
  }
  // Connectivity by breadth-first search from agent 1.
  std::vector<std::vector<int>> adj(n_agents_ + 1);
  for (const auto& [i, j] : edges_) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<bool> visited(n_agents_ + 1, false);
  std::queue<int> frontier;
  frontier.push(1);
  visited[1] = true;
  int count = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int w : adj[v]) {
      if (!visited[w]) {
        visited[w] = true;
        ++count;
        frontier.push(w);
      }
    }
  }
  if (count != n_agents_) {
    throw std::invalid_argument("Topology: graph is not connected");
  }
}

std::vector<int> Topology::neighbors(int i) const {
  if (i < 1 || i > n_agents_) {
    throw std::invalid_argument("Topology::neighbors: agent out of range");
  }
  std::vector<int> out;
  for (const auto& [a, b] : edges_) {
    if (a == i) out.push_back(b);
    if (b == i) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Topology::adjacent(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::find(edges_.begin(), edges_.end(), std::make_pair(i, j)) !=
         edges_.end();
}

SparsityPattern sparsity_pattern(const Topology& t) {
  SparsityPattern p;
  p.n_agents = t.n_agents();
  p.allowed.assign(p.n_agents, std::vector<bool>(p.n_agents, false));
  for (int i = 1; i <= p.n_agents; ++i) {
    p.allowed[i - 1][i - 1] = true;
    for (int j : t.neighbors(i)) p.allowed[i - 1][j - 1] = true;
  }
  return p;
}

MatrixXd laplacian(const Topology& t) {
  const int n = t.n_agents();
  Eigen::MatrixXi l = Eigen::MatrixXi::Zero(n, n);
  for (const auto& [i, j] : t.edges()) {
    l(i - 1, i - 1) += 1;
    l(j - 1, j - 1) += 1;
    l(i - 1, j - 1) -= 1;
    l(j - 1, i - 1) -= 1;
  }
  return l.cast<double>();
}

MatrixXd delta(int n, int n_agents) {
  if (n < 1 || n_agents < 1) {
    throw std::invalid_argument("delta: dimensions must be positive");
  }
  MatrixXd upper = MatrixXd::Zero(n_agents, n_agents);
  for (int i = 0; i < n_agents; ++i)
    for (int j = i; j < n_agents; ++j) upper(i, j) = 1.0;
  return Eigen::kroneckerProduct(upper, MatrixXd::Identity(n, n)).eval();
}

std::vector<int> neighbors(const Topology& t, int i) { return t.neighbors(i); }

}  // namespace subopt::graph
