#pragma once

#include <vector>

#include <Eigen/Dense>

#include "subopt/network.hpp"

namespace subopt::structure {

using Eigen::MatrixXd;

// Linear subspace of error-coordinate gains realizable by diffusive laws on
// the given graph. Vectors live in R^(mN * n(N-1)), column-major vec of ke.
struct GainSubspace {
  MatrixXd basis;        // columns span the admissible subspace
  MatrixXd annihilator;  // rows span the orthogonal complement
  std::vector<int> agent_dims;  // per-agent dimension, |N_i| * m * n
  int rows = 0;          // mN
  int cols = 0;          // n(N-1)
};

GainSubspace admissible_subspace(const graph::Topology& t, int n, int m);

// Linear equality constraints C vec_sym(P) = 0 on a symmetric q x q matrix P
// that make -rhat^-1 btil^T P an admissible gain. vec_sym stacks the upper
// triangle column-major: (0,0), (0,1), (1,1), (0,2), ...
struct PConstraintSet {
  MatrixXd c;  // rows x q(q+1)/2, full row rank
  int dim = 0; // q
};

PConstraintSet derive_P_constraints(const net::ErrorSystem& es,
                                    const GainSubspace& sub);

// True when the annihilator functionals vanish on ke within
// 1e-8 * (1 + ||ke||_F).
bool validate_gain_structure(const GainSubspace& sub, const MatrixXd& ke);

// vec_sym index helpers shared with the SDP layer.
int sym_dim(int q);
Eigen::VectorXd vec_sym(const MatrixXd& p);
MatrixXd unvec_sym(const Eigen::VectorXd& v, int q);

}  // namespace subopt::structure
