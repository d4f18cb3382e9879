#include "subopt/structure.hpp"

#include <algorithm>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace subopt::structure {

int sym_dim(int q) { return q * (q + 1) / 2; }

Eigen::VectorXd vec_sym(const MatrixXd& p) {
  const int q = static_cast<int>(p.rows());
  Eigen::VectorXd v(sym_dim(q));
  int idx = 0;
  for (int j = 0; j < q; ++j)
    for (int i = 0; i <= j; ++i) v(idx++) = p(i, j);
  return v;
}

MatrixXd unvec_sym(const Eigen::VectorXd& v, int q) {
  MatrixXd p(q, q);
  int idx = 0;
  for (int j = 0; j < q; ++j)
    for (int i = 0; i <= j; ++i) {
      p(i, j) = v(idx);
      p(j, i) = v(idx);
      ++idx;
    }
  return p;
}

GainSubspace admissible_subspace(const graph::Topology& t, int n, int m) {
  if (n < 1 || m < 1) {
    throw std::invalid_argument("admissible_subspace: bad dimensions");
  }
  const int N = t.n_agents();
  const int rows = m * N;
  const int cols = n * (N - 1);

  GainSubspace sub;
  sub.rows = rows;
  sub.cols = cols;

  // One generator per (agent, neighbor, input row, state column): the unit
  // law u_i = E_rc (x_i - x_j), written in error coordinates. With the edge
  // between consecutive-agent positions a < b, that law reads on the error
  // blocks a..b-1 (the telescoping sum of consecutive differences).
  std::vector<Eigen::VectorXd> gens;
  sub.agent_dims.assign(N, 0);
  for (int i = 1; i <= N; ++i) {
    std::vector<Eigen::VectorXd> agent_gens;
    for (int j : t.neighbors(i)) {
      const int lo = std::min(i, j);
      const int hi = std::max(i, j);
      const double sign = (i < j) ? 1.0 : -1.0;
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) {
          MatrixXd ke = MatrixXd::Zero(rows, cols);
          for (int blk = lo - 1; blk < hi - 1; ++blk) {
            ke((i - 1) * m + r, blk * n + c) = sign;
          }
          agent_gens.push_back(
              Eigen::Map<Eigen::VectorXd>(ke.data(), rows * cols));
        }
      }
    }
    MatrixXd ag(rows * cols, static_cast<int>(agent_gens.size()));
    for (size_t k = 0; k < agent_gens.size(); ++k) ag.col(k) = agent_gens[k];
    Eigen::ColPivHouseholderQR<MatrixXd> qr(ag);
    qr.setThreshold(1e-10);
    sub.agent_dims[i - 1] = static_cast<int>(qr.rank());
    const int expected = static_cast<int>(t.neighbors(i).size()) * m * n;
    if (sub.agent_dims[i - 1] != expected) {
      throw NumericalError("admissible_subspace: agent " + std::to_string(i) +
                           " produced a degenerate generator set");
    }
    for (auto& g : agent_gens) gens.push_back(std::move(g));
  }

  MatrixXd all(rows * cols, static_cast<int>(gens.size()));
  for (size_t k = 0; k < gens.size(); ++k) all.col(k) = gens[k];

  // Orthonormal basis and its complement from a full QR factorization.
  Eigen::ColPivHouseholderQR<MatrixXd> qr(all);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  MatrixXd qfull =
      qr.householderQ() * MatrixXd::Identity(rows * cols, rows * cols);
  sub.basis = qfull.leftCols(rank);
  sub.annihilator = qfull.rightCols(rows * cols - rank).transpose();
  return sub;
}

PConstraintSet derive_P_constraints(const net::ErrorSystem& es,
                                    const GainSubspace& sub) {
  const int q = static_cast<int>(es.atil.rows());
  const int nsym = sym_dim(q);
  Eigen::LLT<MatrixXd> rhat(es.rhat);

  // Columns of the map vec_sym(P) -> vec(-rhat^-1 btil^T P).
  MatrixXd map(sub.rows * sub.cols, nsym);
  int idx = 0;
  for (int j = 0; j < q; ++j) {
    for (int i = 0; i <= j; ++i) {
      MatrixXd s = MatrixXd::Zero(q, q);
      s(i, j) = 1.0;
      s(j, i) = 1.0;
      MatrixXd ke = -rhat.solve(es.btil.transpose() * s);
      map.col(idx++) = Eigen::Map<Eigen::VectorXd>(ke.data(), ke.size());
    }
  }

  MatrixXd raw = sub.annihilator * map;
  PConstraintSet out;
  out.dim = q;
  if (raw.rows() == 0) {
    out.c = MatrixXd::Zero(0, nsym);
    return out;
  }
  // Keep an orthonormal basis of the row space.
  Eigen::JacobiSVD<MatrixXd> svd(raw, Eigen::ComputeThinV);
  // Absolute floor so that an all-zero constraint set yields rank 0.
  const double tol = std::max(1e-10 * svd.singularValues().maxCoeff(),
                              1e-12 * (1.0 + map.cwiseAbs().maxCoeff()));
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > tol) ++rank;
  }
  out.c = svd.matrixV().leftCols(rank).transpose();
  return out;
}

bool validate_gain_structure(const GainSubspace& sub, const MatrixXd& ke) {
  if (ke.rows() != sub.rows || ke.cols() != sub.cols) return false;
  if (sub.annihilator.rows() == 0) return true;
  Eigen::VectorXd v =
      Eigen::Map<const Eigen::VectorXd>(ke.data(), ke.size());
  const double viol = (sub.annihilator * v).cwiseAbs().maxCoeff();
  return viol < 1e-8 * (1.0 + ke.norm());
}

}  // namespace subopt::structure
