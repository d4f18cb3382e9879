#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "subopt/network.hpp"

namespace subopt::sim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Trajectory {
  std::vector<double> t;
  MatrixXd x;  // row per sample, nN columns
  MatrixXd u;  // row per sample, mN columns
};

struct SimReport {
  double j_quad = 0.0;        // trapezoid quadrature of the running cost
  double tail = 0.0;          // e(T)^T Y e(T), when a response matrix is given
  double metric_initial = 0.0;
  double metric_final = 0.0;
};

// Fixed-step fourth-order Runge-Kutta integration of the closed loop
// xdot = (Ahat + Bhat Kx) x. Requires dt <= T / 100; throws NumericalError
// when the state norm exceeds 1e9 (divergence).
Trajectory simulate(const net::MasProblem& p, const MatrixXd& kx, double T,
                    double dt);

// Trapezoid quadrature of
//   1/2 sum_i sum_{j in N_i} (x_i - x_j)^T qu (x_i - x_j) + sum_i u_i^T ru u_i.
double quadrature_cost(const net::MasProblem& p, const Trajectory& traj);

// Max pairwise ||x_i - x_j||_2 over agents at one stacked state.
double consensus_metric(const VectorXd& x_stacked, int n, int n_agents);

SimReport report(const net::MasProblem& p, const Trajectory& traj,
                 const MatrixXd* y_response = nullptr);

// CSV with header t, x_1_1, ..., u_N_m; 17 significant digits.
void write_csv(const Trajectory& traj, int n, int m, int n_agents,
               const std::string& path);

}  // namespace subopt::sim
