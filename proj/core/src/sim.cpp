#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "subopt/sim.hpp"

namespace subopt::sim {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Trajectory simulate(const net::MasProblem& p, const MatrixXd& kx, double T,
                    double dt) {
  p.validate();
  const int n = p.n();
  const int m = p.m();
  const int na = p.n_agents();
  if (!(T > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("simulate: T and dt must be positive");
  }
  if (dt > T / 100.0) {
    throw std::invalid_argument("simulate: dt must not exceed T/100");
  }
  if (kx.rows() != m * na || kx.cols() != n * na) {
    throw std::invalid_argument("simulate: gain must be mN x nN");
  }

  MatrixXd acl = MatrixXd::Zero(n * na, n * na);
  for (int i = 0; i < na; ++i) {
    acl.block(i * n, i * n, n, n) = p.a;
    acl.block(i * n, 0, n, n * na) += p.b[i] * kx.middleRows(i * m, m);
  }

  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-12));
  const double h = T / static_cast<double>(steps);

  Trajectory traj;
  traj.t.resize(steps + 1);
  traj.x.resize(steps + 1, n * na);
  traj.u.resize(steps + 1, m * na);

  VectorXd x = p.x0;
  for (long s = 0; s <= steps; ++s) {
    traj.t[s] = h * static_cast<double>(s);
    traj.x.row(s) = x.transpose();
    traj.u.row(s) = (kx * x).transpose();
    if (s == steps) break;
    VectorXd k1 = acl * x;
    VectorXd k2 = acl * (x + 0.5 * h * k1);
    VectorXd k3 = acl * (x + 0.5 * h * k2);
    VectorXd k4 = acl * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite() || x.norm() > 1e9) {
      throw NumericalError("simulate: trajectory diverged near t = " +
                           fmt17(traj.t[s] + h));
    }
  }
  return traj;
}

double quadrature_cost(const net::MasProblem& p, const Trajectory& traj) {
  const int n = p.n();
  const int m = p.m();
  const int na = p.n_agents();
  const auto rows = static_cast<long>(traj.x.rows());
  if (rows < 2) return 0.0;
  const double h = traj.t[1] - traj.t[0];

  double acc = 0.0;
  for (long s = 0; s < rows; ++s) {
    double g = 0.0;
    for (int i = 1; i <= na; ++i) {
      const VectorXd xi = traj.x.row(s).segment((i - 1) * n, n).transpose();
      for (int j : p.topology.neighbors(i)) {
        const VectorXd d =
            xi - traj.x.row(s).segment((j - 1) * n, n).transpose();
        g += 0.5 * d.dot(p.qu * d);
      }
      const VectorXd ui = traj.u.row(s).segment((i - 1) * m, m).transpose();
      g += ui.dot(p.ru * ui);
    }
    acc += (s == 0 || s == rows - 1) ? 0.5 * g : g;
  }
  return acc * h;
}

double consensus_metric(const VectorXd& x_stacked, int n, int n_agents) {
  double worst = 0.0;
  for (int i = 0; i < n_agents; ++i) {
    for (int j = i + 1; j < n_agents; ++j) {
      const double d =
          (x_stacked.segment(i * n, n) - x_stacked.segment(j * n, n)).norm();
      worst = std::max(worst, d);
    }
  }
  return worst;
}

SimReport report(const net::MasProblem& p, const Trajectory& traj,
                 const MatrixXd* y_response) {
  const int n = p.n();
  const int na = p.n_agents();
  SimReport rep;
  rep.j_quad = quadrature_cost(p, traj);
  rep.metric_initial = consensus_metric(traj.x.row(0).transpose(), n, na);
  const VectorXd xf = traj.x.row(traj.x.rows() - 1).transpose();
  rep.metric_final = consensus_metric(xf, n, na);
  if (y_response) {
    VectorXd ef(n * (na - 1));
    for (int i = 0; i < na - 1; ++i) {
      ef.segment(i * n, n) =
          xf.segment(i * n, n) - xf.segment((i + 1) * n, n);
    }
    rep.tail = ef.dot(*y_response * ef);
  }
  return rep;
}

void write_csv(const Trajectory& traj, int n, int m, int n_agents,
               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "t";
  for (int i = 1; i <= n_agents; ++i)
    for (int s = 1; s <= n; ++s) out << ",x_" << i << "_" << s;
  for (int i = 1; i <= n_agents; ++i)
    for (int s = 1; s <= m; ++s) out << ",u_" << i << "_" << s;
  out << "\n";
  for (long r = 0; r < static_cast<long>(traj.x.rows()); ++r) {
    out << fmt17(traj.t[r]);
    for (int c = 0; c < traj.x.cols(); ++c) out << "," << fmt17(traj.x(r, c));
    for (int c = 0; c < traj.u.cols(); ++c) out << "," << fmt17(traj.u(r, c));
    out << "\n";
  }
  if (!out.good()) throw std::runtime_error("write_csv: write failed for " + path);
}

}  // namespace subopt::sim
