#include "subopt/linalg.hpp"

#include <complex>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace subopt::linalg {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

MatrixXd kron(const Eigen::Ref<const MatrixXd>& a,
              const Eigen::Ref<const MatrixXd>& b) {
  return Eigen::kroneckerProduct(a, b);
}

MatrixXd upsilon(const Eigen::Ref<const MatrixXd>& psi,
                 const Eigen::Ref<const MatrixXd>& phi,
                 const Eigen::Ref<const MatrixXd>& xi) {
  return (psi + psi.transpose()) * xi * (phi + phi.transpose());
}

MatrixXd gamma_op(const Eigen::Ref<const MatrixXd>& a,
                  const Eigen::Ref<const MatrixXd>& p,
                  const Eigen::Ref<const MatrixXd>& q) {
  return a.transpose() * p + p * a + q;
}

Spectrum spectrum(const Eigen::Ref<const MatrixXd>& a) {
  Eigen::EigenSolver<MatrixXd> es(a, /*computeEigenvectors=*/false);
  Spectrum s;
  s.eigenvalues = es.eigenvalues();
  s.max_real = s.eigenvalues.real().maxCoeff();
  return s;
}

bool is_hurwitz(const Eigen::Ref<const MatrixXd>& a, double tol,
                Spectrum* info) {
  Spectrum s = spectrum(a);
  if (info) *info = s;
  return s.max_real < -tol;
}

MatrixXd lyap_solve(const Eigen::Ref<const MatrixXd>& abar,
                    const Eigen::Ref<const MatrixXd>& w) {
  const auto n = abar.rows();
  if (abar.cols() != n || w.rows() != n || w.cols() != n) {
    throw std::invalid_argument("lyap_solve: dimension mismatch");
  }
  if (!is_hurwitz(abar)) {
    throw InfeasibleError("lyap_solve: matrix is not Hurwitz");
  }

  // abar = U T U^H reduces the equation to T^H X + X T = -U^H W U, solved
  // column by column: the k-th column only couples to earlier ones because T
  // is upper triangular.
  Eigen::ComplexSchur<MatrixXd> schur(abar);
  const MatrixXcd& u = schur.matrixU();
  const MatrixXcd& t = schur.matrixT();
  MatrixXcd c = -(u.adjoint() * w * u);
  MatrixXcd x = MatrixXcd::Zero(n, n);
  MatrixXcd th = t.adjoint();
  for (Eigen::Index j = 0; j < n; ++j) {
    VectorXcd rhs = c.col(j);
    for (Eigen::Index k = 0; k < j; ++k) rhs -= t(k, j) * x.col(k);
    MatrixXcd lhs = th;
    lhs.diagonal().array() += t(j, j);
    x.col(j) = lhs.triangularView<Eigen::Lower>().solve(rhs);
  }
  MatrixXd p = (u * x * u.adjoint()).real();
  p = 0.5 * (p + p.transpose()).eval();

  const double resid =
      (abar.transpose() * p + p * abar + w).norm();
  if (resid > 1e-9 * (1.0 + w.norm())) {
    throw NumericalError("lyap_solve: residual " + std::to_string(resid) +
                         " exceeds tolerance");
  }
  return p;
}

namespace {

// Stabilizability test: every eigenvalue with Re >= 0 must keep
// [a - lambda I, b] at full row rank.
bool is_stabilizable(const MatrixXd& a, const MatrixXd& b) {
  const auto n = a.rows();
  Eigen::EigenSolver<MatrixXd> es(a, /*computeEigenvectors=*/false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> lam = es.eigenvalues()(i);
    if (lam.real() < -1e-9) continue;
    MatrixXcd pencil(n, n + b.cols());
    pencil.leftCols(n) = a.cast<std::complex<double>>();
    pencil.leftCols(n).diagonal().array() -= lam;
    pencil.rightCols(b.cols()) = b.cast<std::complex<double>>();
    Eigen::ColPivHouseholderQR<MatrixXcd> qr(pencil);
    qr.setThreshold(1e-10);
    if (qr.rank() < n) return false;
  }
  return true;
}

}  // namespace

MatrixXd care_solve(const Eigen::Ref<const MatrixXd>& a,
                    const Eigen::Ref<const MatrixXd>& b,
                    const Eigen::Ref<const MatrixXd>& q,
                    const Eigen::Ref<const MatrixXd>& r) {
  const auto n = a.rows();
  const auto m = b.cols();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
      r.rows() != m || r.cols() != m) {
    throw std::invalid_argument("care_solve: dimension mismatch");
  }
  MatrixXd qs = 0.5 * (q + q.transpose());
  if (psd_margin(qs) < -1e-10 * (1.0 + qs.norm())) {
    throw std::invalid_argument("care_solve: q is not positive semidefinite");
  }
  Eigen::LLT<MatrixXd> rc(0.5 * (r + r.transpose()));
  if (rc.info() != Eigen::Success) {
    throw std::invalid_argument("care_solve: r is not positive definite");
  }
  if (!is_stabilizable(a, b)) {
    throw InfeasibleError("care_solve: pair (a, b) is not stabilizable");
  }

  MatrixXd rinv_bt = rc.solve(b.transpose());

  // Stabilizing start: zero gain when a is already Hurwitz, otherwise the
  // shifted-Lyapunov construction K0 = B^T Z^-1 with
  // (A + beta I) Z + Z (A + beta I)^T = 2 B B^T, beta beyond the spectrum.
  MatrixXd k;
  if (is_hurwitz(a)) {
    k = MatrixXd::Zero(m, n);
  } else {
    const double beta = a.norm() + 0.5;
    MatrixXd mshift = -(a + beta * MatrixXd::Identity(n, n));
    MatrixXd z = lyap_solve(mshift.transpose(), 2.0 * b * b.transpose());
    Eigen::FullPivLU<MatrixXd> lu(z);
    if (!lu.isInvertible()) {
      throw NumericalError(
          "care_solve: stabilizing initialization failed (shifted Gramian is "
          "singular)");
    }
    k = b.transpose() * lu.inverse();
  }

  MatrixXd p = MatrixXd::Zero(n, n);
  MatrixXd p_prev;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    MatrixXd acl = a - b * k;
    p = lyap_solve(acl, qs + k.transpose() * r * k);
    k = rinv_bt * p;
    if (it > 0 && (p - p_prev).norm() <= 1e-13 * n * (1.0 + p.norm())) {
      converged = true;
      break;
    }
    p_prev = p;
  }
  const double resid =
      (a.transpose() * p + p * a - p * b * rinv_bt * p + qs).norm();
  if (!converged && resid > 1e-9 * (1.0 + qs.norm())) {
    throw NumericalError("care_solve: iteration did not converge");
  }
  if (resid > 1e-9 * (1.0 + qs.norm())) {
    throw NumericalError("care_solve: residual " + std::to_string(resid) +
                         " exceeds tolerance");
  }
  if (!is_hurwitz(a - b * rinv_bt * p, 0.0)) {
    throw NumericalError("care_solve: solution is not stabilizing");
  }
  return p;
}

double psd_margin(const Eigen::Ref<const MatrixXd>& m) {
  MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace subopt::linalg
