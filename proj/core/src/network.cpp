#include "subopt/network.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "subopt/graph.hpp"
#include "subopt/linalg.hpp"

namespace subopt::net {

void MasProblem::validate() const {
  const int nn = n();
  if (nn < 1 || a.cols() != nn) {
    throw std::invalid_argument("MasProblem: a must be square");
  }
  if (static_cast<int>(b.size()) != n_agents()) {
    throw std::invalid_argument(
        "MasProblem: need one input matrix per agent");
  }
  const int mm = m();
  if (mm < 1 || mm > nn) {
    throw std::invalid_argument("MasProblem: need 1 <= m <= n");
  }
  for (size_t i = 0; i < b.size(); ++i) {
    if (b[i].rows() != nn || b[i].cols() != mm) {
      throw std::invalid_argument("MasProblem: input matrix " +
                                  std::to_string(i + 1) +
                                  " has inconsistent dimensions");
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(b[i]);
    if (qr.rank() < mm) {
      throw std::invalid_argument("MasProblem: input matrix " +
                                  std::to_string(i + 1) +
                                  " does not have full column rank");
    }
  }
  if (qu.rows() != nn || qu.cols() != nn) {
    throw std::invalid_argument("MasProblem: qu must be n x n");
  }
  if (linalg::psd_margin(qu) < -1e-10 * (1.0 + qu.norm())) {
    throw std::invalid_argument("MasProblem: qu is not positive semidefinite");
  }
  if (ru.rows() != mm || ru.cols() != mm) {
    throw std::invalid_argument("MasProblem: ru must be m x m");
  }
  Eigen::LLT<MatrixXd> llt(0.5 * (ru + ru.transpose()));
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("MasProblem: ru is not positive definite");
  }
  if (x0.size() != static_cast<Eigen::Index>(nn) * n_agents()) {
    throw std::invalid_argument("MasProblem: x0 must have n * N entries");
  }
}

ErrorSystem build_error_system(const MasProblem& p) {
  p.validate();
  const int n = p.n();
  const int m = p.m();
  const int N = p.n_agents();
  const int q = n * (N - 1);

  ErrorSystem es;
  es.atil = linalg::kron(MatrixXd::Identity(N - 1, N - 1), p.a);

  es.btil = MatrixXd::Zero(q, m * N);
  for (int r = 0; r < N - 1; ++r) {
    es.btil.block(r * n, r * m, n, m) = p.b[r];
    es.btil.block(r * n, (r + 1) * m, n, m) = -p.b[r + 1];
  }

  // The pairwise cost in stacked coordinates is x^T (L (x) qu) x. Changing to
  // (errors, last state) through delta makes the last-state block vanish
  // exactly; whatever remains there measures assembly error.
  MatrixXd d = graph::delta(n, N);
  MatrixXd full =
      d.transpose() * linalg::kron(graph::laplacian(p.topology), p.qu) * d;
  es.qtil = full.topLeftCorner(q, q);
  es.qtil = 0.5 * (es.qtil + es.qtil.transpose()).eval();
  const double border =
      std::max(full.bottomRows(n).norm(), full.rightCols(n).norm());
  es.qtil_discard_norm = border;
  if (border > 1e-10 * (1.0 + p.qu.norm())) {
    throw NumericalError(
        "build_error_system: dropped block is not numerically zero");
  }

  es.rhat = linalg::kron(MatrixXd::Identity(N, N), p.ru);

  es.e0.resize(q);
  for (int i = 0; i < N - 1; ++i) {
    es.e0.segment(i * n, n) =
        p.x0.segment(i * n, n) - p.x0.segment((i + 1) * n, n);
  }
  return es;
}

MatrixXd ke_from_kx(const MatrixXd& kx, int n, int m, int n_agents) {
  if (kx.rows() != static_cast<Eigen::Index>(m) * n_agents ||
      kx.cols() != static_cast<Eigen::Index>(n) * n_agents) {
    throw std::invalid_argument("ke_from_kx: gain has wrong dimensions");
  }
  const double scale = 1.0 + kx.cwiseAbs().maxCoeff();
  for (int i = 0; i < n_agents; ++i) {
    MatrixXd row_sum = MatrixXd::Zero(m, n);
    for (int j = 0; j < n_agents; ++j) {
      row_sum += kx.block(i * m, j * n, m, n);
    }
    if (row_sum.cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw StructureError("ke_from_kx: agent " + std::to_string(i + 1) +
                           " row-block sum is nonzero (law is not diffusive)");
    }
  }
  MatrixXd ke(m * n_agents, n * (n_agents - 1));
  MatrixXd cum = MatrixXd::Zero(m * n_agents, n);
  for (int j = 0; j < n_agents - 1; ++j) {
    cum += kx.middleCols(j * n, n);
    ke.middleCols(j * n, n) = cum;
  }
  return ke;
}

MatrixXd kx_from_ke(const MatrixXd& ke, const graph::SparsityPattern& pattern,
                    int n, int m) {
  const int N = pattern.n_agents;
  if (ke.rows() != static_cast<Eigen::Index>(m) * N ||
      ke.cols() != static_cast<Eigen::Index>(n) * (N - 1)) {
    throw std::invalid_argument("kx_from_ke: gain has wrong dimensions");
  }
  MatrixXd kx(m * N, n * N);
  for (int j = 0; j < N; ++j) {
    if (j == 0) {
      kx.middleCols(0, n) = ke.middleCols(0, n);
    } else if (j < N - 1) {
      kx.middleCols(j * n, n) =
          ke.middleCols(j * n, n) - ke.middleCols((j - 1) * n, n);
    } else {
      kx.middleCols(j * n, n) = -ke.middleCols((N - 2) * n, n);
    }
  }
  const double scale = 1.0 + ke.cwiseAbs().maxCoeff();
  std::string offending;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (pattern.allowed[i][j]) continue;
      if (kx.block(i * m, j * n, m, n).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        if (!offending.empty()) offending += ", ";
        offending += "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                     ")";
      }
    }
  }
  if (!offending.empty()) {
    throw StructureError(
        "kx_from_ke: gain requires links outside the graph at blocks " +
        offending);
  }
  return kx;
}

MatrixXd closed_loop_error_matrix(const ErrorSystem& es, const MatrixXd& ke) {
  return es.atil + es.btil * ke;
}

}  // namespace subopt::net
