#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "subopt/synth.hpp"

namespace subopt::synth {

namespace {

void check_lqr_dims(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                    const MatrixXd& r, const VectorXd& x0) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  if (a.cols() != n || n < 1) throw std::invalid_argument("design_lqr: A must be square");
  if (b.rows() != n || m < 1) throw std::invalid_argument("design_lqr: B must be n x m");
  if (q.rows() != n || q.cols() != n) throw std::invalid_argument("design_lqr: Q must be n x n");
  if (r.rows() != m || r.cols() != m) throw std::invalid_argument("design_lqr: R must be m x m");
  if (x0.size() != n) throw std::invalid_argument("design_lqr: x0 must have n entries");
}

Certificates make_cert(double delta, const sdp::SdpSolution& sol) {
  Certificates c;
  c.delta = delta;
  c.block_min_eig = sol.block_min_eig;
  c.eq_residual = sol.eq_residual;
  return c;
}

}  // namespace

double cost_of_gain_single(const MatrixXd& a, const MatrixXd& b,
                           const MatrixXd& q, const MatrixXd& r,
                           const MatrixXd& k, const VectorXd& x0) {
  const MatrixXd acl = a + b * k;
  const MatrixXd w = q + k.transpose() * r * k;
  const MatrixXd y = linalg::lyap_solve(acl, w);
  return x0.dot(y * x0);
}

double cost_of_gain(const net::ErrorSystem& es, const MatrixXd& ke) {
  const MatrixXd acl = net::closed_loop_error_matrix(es, ke);
  const MatrixXd w = es.qtil + ke.transpose() * es.rhat * ke;
  const MatrixXd y = linalg::lyap_solve(acl, w);
  return es.e0.dot(y * es.e0);
}

LqrResult design_lqr(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                     const MatrixXd& r, const VectorXd& x0, double delta) {
  check_lqr_dims(a, b, q, r, x0);
  const int n = static_cast<int>(a.rows());

  const MatrixXd pcare = linalg::care_solve(a, b, q, r);
  const double jstar = x0.dot(pcare * x0);

  double data_scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(),
                                q.cwiseAbs().maxCoeff(),
                                4.0 * r.cwiseAbs().maxCoeff()});
  const double delta_conv = delta > 0.0 ? delta : 1e-6 * (1.0 + data_scale);
  const MatrixXd rinv_bt = r.llt().solve(b.transpose());

  LqrResult res;
  MatrixXd p;
  double conv_margin = 0.0;
  bool found = false;
  const double thetas[] = {0.99, 0.95, 0.90, 0.85, 0.80, 0.75,
                           0.70, 0.65, 0.60, 0.55, 0.50};
  for (double theta : thetas) {
    MatrixXd cand = theta * pcare;
    const double margin =
        linalg::psd_margin(sdp::assemble_convexity(a, b, q, r, cand));
    if (margin < delta_conv) continue;
    MatrixXd kc = -rinv_bt * cand;
    if (!linalg::is_hurwitz(a + b * kc)) continue;
    p = std::move(cand);
    res.theta = theta;
    conv_margin = margin;
    found = true;
    break;
  }
  if (!found) {
    const double p_box = 1e3 * (1.0 + pcare.cwiseAbs().maxCoeff());
    sdp::SymVar pv;
    int sv = -1;
    sdp::SdpModel model = sdp::lmi_convexity(a, b, q, r, p_box, &pv, &sv);
    model.set_delta(delta_conv);
    const sdp::SdpSolution sol = sdp::solve(model);
    if (sol.status != sdp::SdpStatus::optimal) {
      throw InfeasibleError(
          "design_lqr: convexity condition admits no strictly feasible "
          "solution (" + sol.note + ")");
    }
    p = model.sym_value(pv, sol.y);
    conv_margin = linalg::psd_margin(sdp::assemble_convexity(a, b, q, r, p));
    if (conv_margin < delta_conv) {
      throw InfeasibleError(
          "design_lqr: maximum convexity margin is below the strictness "
          "threshold");
    }
    res.theta = 0.0;
  }

  res.p = p;
  res.k = -0.5 * rinv_bt * (p + p.transpose());
  const MatrixXd acl = a + b * res.k;
  if (!linalg::is_hurwitz(acl, 1e-8, &res.closed_loop)) {
    throw InfeasibleError(
        "design_lqr: feedback from the convexity solution does not "
        "stabilize the plant");
  }

  res.stable_branch = linalg::is_hurwitz(a);
  sdp::SymVar pbv;
  if (res.stable_branch) {
    sdp::SdpModel model = sdp::lmi_pbar_stable(a, b, q, r, p, x0, &pbv);
    if (delta > 0.0) model.set_delta(delta);
    const sdp::SdpSolution sol = sdp::solve(model);
    if (sol.status == sdp::SdpStatus::infeasible) {
      throw InfeasibleError("design_lqr: stable-branch bound program is "
                            "infeasible (" + sol.note + ")");
    }
    if (sol.status != sdp::SdpStatus::optimal) {
      throw NumericalError("design_lqr: stable-branch solve failed (" +
                           sol.note + ")");
    }
    res.pbar = model.sym_value(pbv, sol.y);
    res.ptilde = MatrixXd::Zero(n, n);
    res.eta = 0.0;
    res.bound = x0.dot(res.pbar * x0);
    res.cert = make_cert(model.delta(), sol);
  } else {
    sdp::SymVar pb;
    int ev = -1;
    sdp::SdpModel model = sdp::lmi_eta(a, b, q, r, p, &pb, &ev);
    if (delta > 0.0) model.set_delta(delta);
    const sdp::SdpSolution sol = sdp::solve(model);
    if (sol.status == sdp::SdpStatus::infeasible) {
      throw InfeasibleError("design_lqr: shifted bound program is infeasible (" +
                            sol.note + ")");
    }
    if (sol.status != sdp::SdpStatus::optimal) {
      throw NumericalError("design_lqr: shifted bound solve failed (" +
                           sol.note + ")");
    }
    res.pbar = model.sym_value(pb, sol.y);
    res.eta = sol.y(ev);
    res.ptilde = linalg::lyap_solve(acl, MatrixXd::Identity(n, n));
    res.bound = x0.dot((res.pbar + res.eta * res.ptilde) * x0);
    res.cert = make_cert(model.delta(), sol);
  }
  res.cert.block_min_eig.insert(res.cert.block_min_eig.begin(), conv_margin);

  res.jstar = jstar;
  res.epsilon = res.bound - jstar;
  res.jactual = cost_of_gain_single(a, b, q, r, res.k, x0);
  const double slack = 1e-6 * (1.0 + std::abs(res.jactual));
  if (res.jactual > res.bound + slack) {
    throw NumericalError("design_lqr: certified bound is below the exact cost");
  }
  if (jstar > res.jactual + slack) {
    throw NumericalError("design_lqr: exact cost is below the optimum");
  }
  return res;
}

namespace {

ConsensusResult finish_consensus(const net::ErrorSystem& es,
                                 const sdp::SdpModel& model,
                                 const sdp::SdpSolution& sol,
                                 const sdp::SymVar& phat_v,
                                 const sdp::SymVar& pbarhat_v, int eta_v) {
  ConsensusResult res;
  res.phat = model.sym_value(phat_v, sol.y);
  res.pbarhat = model.sym_value(pbarhat_v, sol.y);
  res.eta = sol.y(eta_v);

  const int q = static_cast<int>(es.atil.rows());
  res.ke = -es.rhat.llt().solve(es.btil.transpose() * res.phat);

  const MatrixXd acl = net::closed_loop_error_matrix(es, res.ke);
  if (!linalg::is_hurwitz(acl, 1e-8, &res.closed_loop)) {
    throw NumericalError(
        "consensus synthesis: closed-loop error system is not Hurwitz");
  }
  res.ptilde_e = linalg::lyap_solve(acl, MatrixXd::Identity(q, q));
  res.gamma = es.e0.dot((res.pbarhat + res.eta * res.ptilde_e) * es.e0);
  res.jactual = cost_of_gain(es, res.ke);
  if (!(res.jactual < res.gamma)) {
    throw NumericalError("consensus synthesis: bound does not dominate the "
                         "exact cost");
  }
  res.cert = make_cert(model.delta(), sol);
  return res;
}

}  // namespace

ConsensusResult design_protocol(const net::MasProblem& p, double delta) {
  p.validate();
  const net::ErrorSystem es = net::build_error_system(p);
  const structure::GainSubspace sub =
      structure::admissible_subspace(p.topology, p.n(), p.m());
  const structure::PConstraintSet pcon =
      structure::derive_P_constraints(es, sub);

  sdp::SymVar phat_v, pbarhat_v;
  int eta_v = -1;
  sdp::SdpModel model =
      sdp::lmi_consensus(es, pcon, &phat_v, &pbarhat_v, &eta_v);
  if (delta > 0.0) model.set_delta(delta);
  const sdp::SdpSolution sol = sdp::solve(model);
  if (sol.status == sdp::SdpStatus::infeasible) {
    throw InfeasibleError("design_protocol: synthesis program is infeasible (" +
                          sol.note + ")");
  }
  if (sol.status != sdp::SdpStatus::optimal) {
    throw NumericalError("design_protocol: solve failed (" + sol.note + ")");
  }

  ConsensusResult res =
      finish_consensus(es, model, sol, phat_v, pbarhat_v, eta_v);
  if (!structure::validate_gain_structure(sub, res.ke)) {
    throw NumericalError(
        "design_protocol: synthesized gain violates the information "
        "structure");
  }
  res.kx = net::kx_from_ke(res.ke, graph::sparsity_pattern(p.topology), p.n(),
                           p.m());
  return res;
}

ConsensusResult certify_protocol(const net::MasProblem& p,
                                 const MatrixXd& kx, double delta) {
  p.validate();
  const int n = p.n();
  const int m = p.m();
  const int na = p.n_agents();
  if (kx.rows() != m * na || kx.cols() != n * na) {
    throw std::invalid_argument("certify_protocol: gain must be mN x nN");
  }
  const net::ErrorSystem es = net::build_error_system(p);
  const MatrixXd ke = net::ke_from_kx(kx, n, m, na);
  const structure::GainSubspace sub =
      structure::admissible_subspace(p.topology, n, m);
  if (!structure::validate_gain_structure(sub, ke)) {
    throw StructureError(
        "certify_protocol: gain is not realizable by diffusive laws on this "
        "graph");
  }
  if (!linalg::is_hurwitz(net::closed_loop_error_matrix(es, ke))) {
    throw InfeasibleError(
        "certify_protocol: the given gain does not achieve consensus");
  }

  sdp::SymVar phat_v, pbarhat_v;
  int eta_v = -1;
  sdp::SdpModel model =
      sdp::lmi_bound_given_gain(es, ke, &phat_v, &pbarhat_v, &eta_v);
  if (delta > 0.0) model.set_delta(delta);
  const sdp::SdpSolution sol = sdp::solve(model);
  if (sol.status == sdp::SdpStatus::infeasible) {
    throw InfeasibleError("certify_protocol: bound program is infeasible (" +
                          sol.note + ")");
  }
  if (sol.status != sdp::SdpStatus::optimal) {
    throw NumericalError("certify_protocol: solve failed (" + sol.note + ")");
  }

  ConsensusResult res =
      finish_consensus(es, model, sol, phat_v, pbarhat_v, eta_v);
  // Report the cost of the supplied gain, not of the recovered multiplier.
  res.ke = ke;
  res.kx = kx;
  const MatrixXd acl = net::closed_loop_error_matrix(es, ke);
  linalg::is_hurwitz(acl, 1e-8, &res.closed_loop);
  res.ptilde_e = linalg::lyap_solve(
      acl, MatrixXd::Identity(es.atil.rows(), es.atil.rows()));
  res.gamma = es.e0.dot((res.pbarhat + res.eta * res.ptilde_e) * es.e0);
  res.jactual = cost_of_gain(es, ke);
  if (!(res.jactual < res.gamma)) {
    throw NumericalError("certify_protocol: bound does not dominate the exact "
                         "cost");
  }
  return res;
}

double BaselineResult::radius_for(double gamma) const {
  return std::sqrt(gamma / p);
}

BaselineResult baseline_protocol(const net::MasProblem& p) {
  p.validate();
  const int na = p.n_agents();
  auto near = [](double v, double w) { return std::abs(v - w) <= 1e-12; };
  if (p.n() != 1 || p.m() != 1 || !near(p.a(0, 0), 0.0)) {
    throw std::invalid_argument(
        "baseline_protocol: requires scalar single-integrator agents");
  }
  for (const auto& bi : p.b) {
    if (!near(bi(0, 0), 1.0)) {
      throw std::invalid_argument(
          "baseline_protocol: requires unit input matrices");
    }
  }
  if (!near(p.qu(0, 0), 1.0) || !near(p.ru(0, 0), 1.0)) {
    throw std::invalid_argument(
        "baseline_protocol: requires unit state and input weights");
  }

  const MatrixXd lap = graph::laplacian(p.topology);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(lap, Eigen::EigenvaluesOnly);
  const VectorXd lam = eig.eigenvalues();
  const double lam2 = lam(1);
  const double lamn = lam(na - 1);

  BaselineResult res;
  res.c = 2.0 / (lam2 + lamn);
  const double curve = 2.0 * res.c * lamn - res.c * res.c * lamn * lamn;
  res.p = std::sqrt((lamn + 0.001) / curve);
  res.kx = -res.c * res.p * lap;
  res.x0_norm = p.x0.norm();

  const net::ErrorSystem es = net::build_error_system(p);
  res.jactual = cost_of_gain(es, net::ke_from_kx(res.kx, 1, 1, na));
  return res;
}

}  // namespace subopt::synth
