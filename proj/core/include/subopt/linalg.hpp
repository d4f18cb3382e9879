#pragma once

#include <Eigen/Dense>

#include "subopt/errors.hpp"

namespace subopt::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Kronecker product a (x) b.
MatrixXd kron(const Eigen::Ref<const MatrixXd>& a,
              const Eigen::Ref<const MatrixXd>& b);

// Upsilon(psi, phi) = (psi + psi^T) Xi (phi + phi^T) for a given Xi = B R^-1 B^T.
MatrixXd upsilon(const Eigen::Ref<const MatrixXd>& psi,
                 const Eigen::Ref<const MatrixXd>& phi,
                 const Eigen::Ref<const MatrixXd>& xi);

// Gamma(p) = a^T p + p a + q.
MatrixXd gamma_op(const Eigen::Ref<const MatrixXd>& a,
                  const Eigen::Ref<const MatrixXd>& p,
                  const Eigen::Ref<const MatrixXd>& q);

struct Spectrum {
  VectorXcd eigenvalues;
  double max_real = 0.0;
};

Spectrum spectrum(const Eigen::Ref<const MatrixXd>& a);

// True when every eigenvalue satisfies Re(lambda) < -tol.
bool is_hurwitz(const Eigen::Ref<const MatrixXd>& a, double tol = 1e-8,
                Spectrum* info = nullptr);

// Solves abar^T p + p abar + w = 0 for symmetric p, abar Hurwitz.
// Throws InfeasibleError when abar is not Hurwitz and NumericalError when the
// verified residual exceeds 1e-9 * (1 + ||w||_F).
MatrixXd lyap_solve(const Eigen::Ref<const MatrixXd>& abar,
                    const Eigen::Ref<const MatrixXd>& w);

// Stabilizing solution of a^T p + p a - p b r^-1 b^T p + q = 0.
// Throws InfeasibleError when (a, b) is not stabilizable and NumericalError
// when the verified residual exceeds 1e-9 * (1 + ||q||_F).
MatrixXd care_solve(const Eigen::Ref<const MatrixXd>& a,
                    const Eigen::Ref<const MatrixXd>& b,
                    const Eigen::Ref<const MatrixXd>& q,
                    const Eigen::Ref<const MatrixXd>& r);

// Smallest eigenvalue of the symmetric part of m.
double psd_margin(const Eigen::Ref<const MatrixXd>& m);

}  // namespace subopt::linalg
