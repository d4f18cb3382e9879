#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "subopt/linalg.hpp"
#include "subopt/network.hpp"
#include "subopt/sdp.hpp"
#include "subopt/structure.hpp"

namespace subopt::synth {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Certificates carried by every synthesized or certified law.
struct Certificates {
  double delta = 0.0;
  std::vector<double> block_min_eig;
  std::vector<double> eq_residual;
};

struct LqrResult {
  MatrixXd p;        // convexity-condition solution the gain is built from
  MatrixXd pbar;
  MatrixXd ptilde;   // closed-loop response of identity weight (unstable branch)
  double eta = 0.0;
  MatrixXd k;        // u = K x with K = -1/2 R^-1 B^T (P + P^T)
  double jstar = 0.0;
  double epsilon = 0.0;
  double jactual = 0.0;
  double bound = 0.0;
  bool stable_branch = false;
  double theta = 0.0;  // accepted line-search fraction, 0 when the SDP fallback ran
  linalg::Spectrum closed_loop;
  Certificates cert;
};

// Suboptimal state feedback with an explicit cost bound.
// Branches on open-loop stability; throws InfeasibleError when the plant is
// not stabilizable and NumericalError when a certified invariant fails.
// delta > 0 overrides the automatic strictness margin of every inequality.
LqrResult design_lqr(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                     const MatrixXd& r, const VectorXd& x0, double delta = 0.0);

struct ConsensusResult {
  MatrixXd phat;
  MatrixXd pbarhat;
  MatrixXd ptilde_e;  // closed-loop response of identity weight
  double eta = 0.0;
  MatrixXd ke;
  MatrixXd kx;
  double gamma = 0.0;
  double jactual = 0.0;
  linalg::Spectrum closed_loop;
  Certificates cert;
};

// Synthesizes a diffusive consensus protocol with bound gamma on the cost.
// delta > 0 overrides the automatic strictness margin.
ConsensusResult design_protocol(const net::MasProblem& p, double delta = 0.0);

// Bounds the cost of a given diffusive stacked-state gain kx.
// Throws StructureError when kx is not diffusive for the graph and
// InfeasibleError when the closed loop is not Hurwitz or the bound program
// is infeasible. delta > 0 overrides the automatic strictness margin.
ConsensusResult certify_protocol(const net::MasProblem& p, const MatrixXd& kx,
                                 double delta = 0.0);

struct BaselineResult {
  double c = 0.0;
  double p = 0.0;
  MatrixXd kx;        // -c p L
  double jactual = 0.0;
  double x0_norm = 0.0;
  // Initial-state radius sqrt(gamma / p) inside which the law keeps the cost
  // below gamma.
  double radius_for(double gamma) const;
};

// Comparison design for scalar homogeneous single-integrator agents.
// Throws std::invalid_argument outside that class.
BaselineResult baseline_protocol(const net::MasProblem& p);

// Exact quadratic cost of u = K x for a single agent (closed-loop response).
double cost_of_gain_single(const MatrixXd& a, const MatrixXd& b,
                           const MatrixXd& q, const MatrixXd& r,
                           const MatrixXd& k, const VectorXd& x0);

// Exact network cost of the error-coordinate gain ke.
double cost_of_gain(const net::ErrorSystem& es, const MatrixXd& ke);

}  // namespace subopt::synth
