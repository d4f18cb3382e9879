#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "subopt/sdp.hpp"

namespace subopt::sdp {

namespace {

double min_eig_sym(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()),
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Constraint block in the reduced (equality-eliminated) variables.
struct RBlock {
  int dim = 0;
  MatrixXd f0;
  std::vector<int> vars;
  std::vector<MatrixXd> coeff;
  bool box = false;  // barrier-only safeguard, not part of the model
};

MatrixXd rblock_value(const RBlock& b, const VectorXd& t) {
  MatrixXd g = b.f0;
  for (size_t k = 0; k < b.vars.size(); ++k) g += t(b.vars[k]) * b.coeff[k];
  return g;
}

// phi(t) = -sum_b logdet G_b(t); returns false when any block leaves the
// cone. Gradient and Hessian are with respect to the reduced variables.
bool barrier_eval(const std::vector<RBlock>& blocks, const VectorXd& t,
                  double* phi, VectorXd* grad, MatrixXd* hess) {
  const int k = static_cast<int>(t.size());
  if (phi) *phi = 0.0;
  if (grad) grad->setZero(k);
  if (hess) hess->setZero(k, k);
  for (const auto& b : blocks) {
    if (b.dim == 1) {
      double g = b.f0(0, 0);
      for (size_t i = 0; i < b.vars.size(); ++i)
        g += t(b.vars[i]) * b.coeff[i](0, 0);
      if (!(g > 0.0)) return false;
      if (phi) *phi -= std::log(g);
      if (grad || hess) {
        for (size_t i = 0; i < b.vars.size(); ++i) {
          const double fi = b.coeff[i](0, 0);
          if (grad) (*grad)(b.vars[i]) -= fi / g;
          if (hess) {
            for (size_t j = 0; j < b.vars.size(); ++j) {
              const double fj = b.coeff[j](0, 0);
              (*hess)(b.vars[i], b.vars[j]) += fi * fj / (g * g);
            }
          }
        }
      }
      continue;
    }
    MatrixXd g = rblock_value(b, t);
    Eigen::LLT<MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) return false;
    if (phi) {
      const auto& l = llt.matrixLLT();
      for (int i = 0; i < b.dim; ++i) *phi -= 2.0 * std::log(l(i, i));
    }
    if (grad || hess) {
      MatrixXd linv = llt.matrixL().solve(MatrixXd::Identity(b.dim, b.dim));
      const int nv = static_cast<int>(b.vars.size());
      MatrixXd vm(b.dim * b.dim, nv);
      for (int i = 0; i < nv; ++i) {
        MatrixXd vi = linv * b.coeff[i] * linv.transpose();
        if (grad) (*grad)(b.vars[i]) -= vi.trace();
        vm.col(i) = Eigen::Map<VectorXd>(vi.data(), vi.size());
      }
      if (hess) {
        MatrixXd hloc = vm.transpose() * vm;
        for (int i = 0; i < nv; ++i)
          for (int j = 0; j < nv; ++j)
            (*hess)(b.vars[i], b.vars[j]) += hloc(i, j);
      }
    }
  }
  return true;
}

struct NewtonResult {
  int iters = 0;
  bool converged = false;      // reached the decrement tolerance
  bool stalled = false;        // no usable descent step
  double last_decrement = std::numeric_limits<double>::infinity();
};

// Damped Newton on tau * c^T t + phi(t), keeping every block inside the cone.
// The Newton system is Jacobi-scaled: curvatures span many orders of
// magnitude once some block sits near the cone boundary. An optional stop
// predicate ends the run early (used by phase one once strict feasibility is
// reached, before the centering drifts the free coordinates).
NewtonResult newton_minimize(const std::vector<RBlock>& blocks,
                             const VectorXd& c, double tau, VectorXd& t,
                             double tol, int max_iters,
                             const std::function<bool(const VectorXd&)>& stop =
                                 {}) {
  NewtonResult res;
  const int k = static_cast<int>(t.size());
  double phi = 0.0;
  VectorXd grad(k);
  MatrixXd hess(k, k);
  for (int it = 0; it < max_iters; ++it) {
    if (!barrier_eval(blocks, t, &phi, &grad, &hess)) {
      res.stalled = true;
      return res;
    }
    const VectorXd gradf = tau * c + grad;
    VectorXd dscale(k);
    for (int i = 0; i < k; ++i) {
      dscale(i) = 1.0 / std::sqrt(std::max(hess(i, i), 1e-300));
    }
    const MatrixXd hs =
        dscale.asDiagonal() * hess * dscale.asDiagonal();
    const VectorXd gs = dscale.cwiseProduct(gradf);
    double reg = 1e-13;
    VectorXd dt = VectorXd::Zero(k);
    for (int attempt = 0; attempt < 8; ++attempt) {
      MatrixXd h = hs;
      h.diagonal().array() += reg;
      Eigen::LDLT<MatrixXd> ldlt(h);
      const VectorXd ds = ldlt.solve(-gs);
      if (ldlt.info() == Eigen::Success && gs.dot(ds) < 0.0) {
        dt = dscale.cwiseProduct(ds);
        break;
      }
      reg *= 100.0;
    }
    const double descent = gradf.dot(dt);
    if (!(descent < 0.0)) {
      res.stalled = true;
      return res;
    }
    const double lambda2 = -descent;
    res.last_decrement = 0.5 * lambda2;
    if (res.last_decrement < tol) {
      res.converged = true;
      return res;
    }

    // Damped step: 1/(1+lambda) is feasible and decreases a self-concordant
    // barrier; the full step only enters near the quadratic phase.
    const double lambda = std::sqrt(lambda2);
    const double f0 = tau * c.dot(t) + phi;
    double alpha = (lambda <= 0.25) ? 1.0 : 1.0 / (1.0 + lambda);
    bool accepted = false;
    while (alpha > 1e-14) {
      VectorXd tn = t + alpha * dt;
      double phin;
      if (barrier_eval(blocks, tn, &phin, nullptr, nullptr)) {
        const double fn = tau * c.dot(tn) + phin;
        if (fn <= f0 + 1e-4 * alpha * descent) {
          t = tn;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    ++res.iters;
    if (!accepted) {
      res.stalled = true;
      return res;
    }
    if (stop && stop(t)) return res;
  }
  return res;
}

double total_barrier_dim(const std::vector<RBlock>& blocks) {
  double m = 0.0;
  for (const auto& b : blocks) m += b.dim;
  return m;
}

}  // namespace

bool verify(const SdpModel& model, const VectorXd& y,
            std::vector<double>* block_min_eig,
            std::vector<double>* eq_residual) {
  bool ok = true;
  if (block_min_eig) block_min_eig->clear();
  if (eq_residual) eq_residual->clear();
  for (const auto& b : model.blocks()) {
    const double lmin = min_eig_sym(model.block_value(b, y));
    if (block_min_eig) block_min_eig->push_back(lmin);
    if (lmin < 0.5 * model.delta()) ok = false;
  }
  for (size_t e = 0; e < model.eq_lhs().size(); ++e) {
    const double r = std::abs(model.eq_lhs()[e].dot(y) - model.eq_rhs()[e]);
    if (eq_residual) eq_residual->push_back(r);
    if (r >= 1e-7 * (1.0 + std::abs(model.eq_rhs()[e]))) ok = false;
  }
  return ok;
}

SdpSolution solve(const SdpModel& model_in, const SolveOptions& opts) {
  SdpModel model = model_in;
  model.finalize();
  const int nv = model.num_vars();
  SdpSolution sol;

  // Equality elimination: y = y_p + Z t with Z spanning the null space.
  VectorXd y_p = VectorXd::Zero(nv);
  MatrixXd z = MatrixXd::Identity(nv, nv);
  const int ne = static_cast<int>(model.eq_lhs().size());
  if (ne > 0) {
    MatrixXd e(ne, nv);
    VectorXd d(ne);
    for (int i = 0; i < ne; ++i) {
      e.row(i) = model.eq_lhs()[i].transpose();
      d(i) = model.eq_rhs()[i];
    }
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(e);
    y_p = cod.solve(d);
    if ((e * y_p - d).cwiseAbs().maxCoeff() >
        1e-9 * (1.0 + d.cwiseAbs().maxCoeff())) {
      sol.status = SdpStatus::infeasible;
      sol.note = "equality constraints are inconsistent";
      return sol;
    }
    Eigen::FullPivLU<MatrixXd> lu(e);
    lu.setThreshold(1e-12);
    MatrixXd kern = lu.kernel();
    if (kern.cols() == 1 && kern.col(0).cwiseAbs().maxCoeff() == 0.0) {
      z.resize(nv, 0);  // fully determined system
    } else {
      Eigen::HouseholderQR<MatrixXd> qr(kern);
      z = qr.householderQ() * MatrixXd::Identity(nv, kern.cols());
    }
  }
  const int nred = static_cast<int>(z.cols());

  // Reduced blocks with the strictness margin folded in.
  std::vector<RBlock> rblocks;
  for (const auto& b : model.blocks()) {
    RBlock rb;
    rb.dim = b.dim;
    rb.f0 = b.f0 - model.delta() * MatrixXd::Identity(b.dim, b.dim);
    for (size_t k = 0; k < b.vars.size(); ++k) {
      rb.f0 += y_p(b.vars[k]) * b.coeff[k];
    }
    std::vector<MatrixXd> red(nred);
    std::vector<bool> used(nred, false);
    for (size_t k = 0; k < b.vars.size(); ++k) {
      const auto row = z.row(b.vars[k]);
      for (int i = 0; i < nred; ++i) {
        if (row(i) == 0.0) continue;
        if (!used[i]) {
          red[i] = MatrixXd::Zero(b.dim, b.dim);
          used[i] = true;
        }
        red[i] += row(i) * b.coeff[k];
      }
    }
    for (int i = 0; i < nred; ++i) {
      if (used[i] && red[i].cwiseAbs().maxCoeff() > 0.0) {
        rb.vars.push_back(i);
        rb.coeff.push_back(std::move(red[i]));
      }
    }
    rblocks.push_back(std::move(rb));
  }
  // Recession safeguard: huge box on every original variable.
  std::vector<double> box(nv);
  if (nred > 0) {
    for (int k = 0; k < nv; ++k) {
      box[k] = opts.var_box * (1.0 + std::abs(y_p(k)));
      for (int sgn : {+1, -1}) {
        RBlock rb;
        rb.dim = 1;
        rb.box = true;
        rb.f0 = MatrixXd::Constant(1, 1, box[k] - sgn * y_p(k));
        const auto row = z.row(k);
        for (int i = 0; i < nred; ++i) {
          if (row(i) == 0.0) continue;
          rb.vars.push_back(i);
          rb.coeff.push_back(MatrixXd::Constant(1, 1, -sgn * row(i)));
        }
        rblocks.push_back(std::move(rb));
      }
    }
  }

  VectorXd c_full = model.objective();
  VectorXd c_red = z.transpose() * c_full;
  const double c0 = c_full.dot(y_p);

  auto finish = [&](const VectorXd& t, SdpStatus tentative,
                    std::string note) {
    sol.y = y_p + z * t;
    sol.objective = c_full.dot(sol.y);
    sol.note = std::move(note);
    bool box_active = false;
    for (int k = 0; k < nv && nred > 0; ++k) {
      if (std::abs(sol.y(k)) > 0.9 * box[k]) box_active = true;
    }
    const bool ok = verify(model, sol.y, &sol.block_min_eig, &sol.eq_residual);
    if (tentative == SdpStatus::optimal) {
      if (box_active) {
        sol.status = SdpStatus::numerical_failure;
        sol.note += (sol.note.empty() ? "" : "; ");
        sol.note += "variable bound safeguard active";
      } else if (!ok) {
        sol.status = SdpStatus::numerical_failure;
        sol.note += (sol.note.empty() ? "" : "; ");
        sol.note += "independent verification rejected the solution";
      } else {
        sol.status = SdpStatus::optimal;
      }
    } else {
      sol.status = tentative;
    }
    return sol;
  };

  if (nred == 0) {
    VectorXd t(0);
    bool feasible = true;
    for (const auto& b : model.blocks()) {
      if (min_eig_sym(model.block_value(b, y_p)) < 0.5 * model.delta())
        feasible = false;
    }
    return finish(t, feasible ? SdpStatus::optimal : SdpStatus::infeasible,
                  "fully determined by equalities");
  }

  double data_scale = 0.0;
  for (const auto& b : model.blocks()) {
    data_scale = std::max(data_scale, b.f0.cwiseAbs().maxCoeff());
  }
  const double eps_int = 1e-9 * (1.0 + data_scale);

  VectorXd t = VectorXd::Zero(nred);
  auto real_margin = [&](const VectorXd& tt) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& rb : rblocks) {
      if (rb.box) continue;
      m = std::min(m, min_eig_sym(rblock_value(rb, tt)));
    }
    return m;
  };

  // Phase I: minimize s with G_b(t) + s I inside the cone, stopping the
  // moment the true blocks have positive margin on their own.
  double margin0 = real_margin(t);
  if (margin0 < eps_int) {
    std::vector<RBlock> ph1 = rblocks;
    const int s_idx = nred;
    for (auto& rb : ph1) {
      if (rb.box) continue;
      rb.vars.push_back(s_idx);
      rb.coeff.push_back(MatrixXd::Identity(rb.dim, rb.dim));
    }
    VectorXd u = VectorXd::Zero(nred + 1);
    u(s_idx) = -margin0 + 0.1 * (1.0 + std::abs(margin0));
    VectorXd c1 = VectorXd::Zero(nred + 1);
    c1(s_idx) = 1.0;
    // Exit once the true blocks clear this margin; the requirement relaxes
    // toward eps_int over the stages so barely-feasible problems still
    // terminate, while easy ones hand phase two a comfortably interior
    // start.
    double exit_margin = 1e-2 * (1.0 + data_scale);
    const auto strictly_feasible = [&](const VectorXd& v) {
      return real_margin(v.head(nred)) >= exit_margin;
    };
    const double m1 = total_barrier_dim(ph1);
    // Start tau large enough that the centering weight m1/tau is a fraction
    // of the infeasibility scale. Small tau would center variables the
    // objective ignores toward their barrier equilibrium, inflating free
    // coordinates that phase two then has to drag back.
    double tau =
        std::max(opts.tau0, m1 / (0.1 * (1.0 + std::abs(margin0))));
    bool feasible = false;
    int stalls = 0;
    for (int stage = 0; stage < 60; ++stage) {
      NewtonResult nr =
          newton_minimize(ph1, c1, tau, u, 1e-9, 60, strictly_feasible);
      sol.newton_iters += nr.iters;
      if (strictly_feasible(u)) {
        t = u.head(nred);
        feasible = true;
        break;
      }
      exit_margin = std::max(eps_int, 0.1 * exit_margin);
      if (sol.newton_iters > opts.max_newton) break;
      const bool centered = nr.converged || nr.last_decrement <= 1e-5;
      if (centered && u(s_idx) - m1 / tau > -eps_int) {
        return finish(u.head(nred), SdpStatus::infeasible,
                      "phase one lower bound " +
                          std::to_string(u(s_idx) - m1 / tau));
      }
      if (nr.stalled && !centered) {
        // A larger tau changes the search direction, so one stall is not
        // final; two in a row is.
        if (++stalls >= 2) {
          return finish(u.head(nred), SdpStatus::numerical_failure,
                        "phase one centering stalled");
        }
      } else {
        stalls = 0;
      }
      tau *= opts.tau_mult;
    }
    if (!feasible) {
      return finish(u.head(nred), SdpStatus::numerical_failure,
                    "phase one did not separate feasible from infeasible");
    }
  }

  // Phase II: path following on the true objective. The m/tau gap certifies
  // optimality only at (approximately) centered points, so a stage that
  // cannot center is a hard failure, never a silent acceptance.
  if (c_red.cwiseAbs().maxCoeff() == 0.0) {
    NewtonResult nr = newton_minimize(rblocks, c_red, 1.0, t, 1e-9, 200);
    sol.newton_iters += nr.iters;
    return finish(t, SdpStatus::optimal, "feasibility problem");
  }
  const double m2 = total_barrier_dim(rblocks);
  double tau = opts.tau0;
  for (int stage = 0; stage < 60; ++stage) {
    NewtonResult nr = newton_minimize(rblocks, c_red, tau, t, 1e-9, 200);
    sol.newton_iters += nr.iters;
    bool centered = nr.converged || nr.last_decrement <= 1e-5;
    // A stage that used its whole budget may still be descending; keep
    // going against the global budget while the decrement keeps halving.
    double prev_dec = nr.last_decrement;
    while (!centered && !nr.stalled && sol.newton_iters < opts.max_newton) {
      nr = newton_minimize(rblocks, c_red, tau, t, 1e-9, 200);
      sol.newton_iters += nr.iters;
      centered = nr.converged || nr.last_decrement <= 1e-5;
      if (!centered && nr.last_decrement > 0.5 * prev_dec) break;
      prev_dec = nr.last_decrement;
    }
    if (!centered) {
      return finish(t, SdpStatus::numerical_failure,
                    "centering failed at stage " + std::to_string(stage));
    }
    const double obj = c_red.dot(t) + c0;
    const double gap = 1.01 * m2 / tau;
    if (gap <= opts.accuracy * std::max(1.0, std::abs(obj))) {
      return finish(t, SdpStatus::optimal, "");
    }
    if (sol.newton_iters > opts.max_newton) {
      return finish(t, SdpStatus::numerical_failure,
                    "newton iteration budget exhausted");
    }
    tau *= opts.tau_mult;
  }
  return finish(t, SdpStatus::numerical_failure, "stage budget exhausted");
}

}  // namespace subopt::sdp
