// Acceptance gate: one criterion per command-line argument (1..7), all when
// run bare. Each criterion prints a single [PASS]/[FAIL] line plus indented
// measurements. Exit code 0 only when every requested criterion passes.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "subopt/errors.hpp"
#include "subopt/graph.hpp"
#include "subopt/linalg.hpp"
#include "subopt/network.hpp"
#include "subopt/sdp.hpp"
#include "subopt/sim.hpp"
#include "subopt/structure.hpp"
#include "subopt/synth.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace subopt;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---- shared example problems --------------------------------------------

MatrixXd scalar(double v) {
  MatrixXd m(1, 1);
  m << v;
  return m;
}

net::MasProblem scalar_integrators(graph::Topology t, VectorXd x0) {
  const int n_agents = t.n_agents();
  return net::MasProblem{MatrixXd::Zero(1, 1),
                         std::vector<MatrixXd>(static_cast<size_t>(n_agents),
                                               MatrixXd::Ones(1, 1)),
                         MatrixXd::Ones(1, 1),
                         MatrixXd::Ones(1, 1),
                         std::move(t),
                         std::move(x0)};
}

VectorXd line4_x0() {
  VectorXd x0(4);
  x0 << 0.1, 0.2, 0.5, -0.5;
  return x0;
}

net::MasProblem line4_problem() {
  return scalar_integrators(graph::Topology(4, {{1, 2}, {2, 3}, {3, 4}}),
                            line4_x0());
}

net::MasProblem ring4_problem() {
  return scalar_integrators(
      graph::Topology(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}}), line4_x0());
}

net::MasProblem mesh4_problem() {
  return scalar_integrators(
      graph::Topology(4, {{1, 2}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}),
      line4_x0());
}

net::MasProblem oscillators_problem() {
  MatrixXd a(2, 2);
  a << 0, 1, -1, 0;
  MatrixXd b(2, 1);
  b << 0, 1;
  VectorXd x0(8);
  x0 << 0.2, 0.1, 0.1, -0.1, -0.1, 0.2, 0.3, 0.0;
  return net::MasProblem{a,
                         std::vector<MatrixXd>(4, b),
                         MatrixXd::Identity(2, 2),
                         MatrixXd::Ones(1, 1),
                         graph::Topology(4, {{1, 2}, {2, 3}, {3, 4}}),
                         std::move(x0)};
}

net::MasProblem rollers_problem() {
  MatrixXd a(3, 3);
  a << 0, 1, 0, 0, -0.01, 0.2, 0, 0, -125;
  std::vector<MatrixXd> b;
  for (double g : {20.0, 18.0, 16.0, 14.0, 12.0}) {
    MatrixXd bi(3, 1);
    bi << 0, 0, g;
    b.push_back(bi);
  }
  VectorXd x0(15);
  x0 << 0.02, 0, 0.01, 0.01, 0.01, -0.01, 0.05, 0.01, 0.01, 0.04, 0.02, 0.02,
      0.07, 0, 0;
  return net::MasProblem{
      a,
      std::move(b),
      10.0 * MatrixXd::Identity(3, 3),
      scalar(0.001),
      graph::Topology(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}}),
      std::move(x0)};
}

MatrixXd published_roller_ke() {
  MatrixXd ke = MatrixXd::Zero(5, 12);
  ke.block(0, 0, 1, 3) << -0.48, -131.40, -32.69;
  ke.block(1, 0, 1, 6) << 0.43, 118.26, 29.42, -0.43, -118.83, -28.17;
  ke.block(2, 3, 1, 6) << 0.38, 105.62, 25.047, -0.44, -121.09, -28.20;
  ke.block(3, 6, 1, 6) << 0.38, 105.96, 24.68, -0.51, -135.99, -30.81;
  ke.block(4, 9, 1, 3) << 0.44, 116.57, 26.40;
  return ke;
}

// ---- criterion 1 ----------------------------------------------------------

bool criterion1(std::vector<std::string>& notes) {
  constexpr double kTargets[5] = {2.70, 1.43, 1.04, 0.88, 0.80};
  constexpr double kAlphas[5] = {0.1, 0.2, 0.3, 0.4, 0.5};
  constexpr double kTol = 0.01;

  const auto p = line4_problem();
  const MatrixXd lap = graph::laplacian(p.topology);
  bool ok = true;
  for (int i = 0; i < 5; ++i) {
    const auto res = synth::certify_protocol(p, -kAlphas[i] * lap);
    const bool hit = std::abs(res.jactual - kTargets[i]) <= kTol &&
                     res.gamma > res.jactual;
    ok = ok && hit;
    notes.push_back("coupling " + fmt(kAlphas[i]) + ": exact cost " +
                    fmt(res.jactual) + " (target " + fmt(kTargets[i]) +
                    " +- " + fmt(kTol) + "), bound " + fmt(res.gamma) +
                    (hit ? "" : "  <-- out of tolerance"));
  }
  return ok;
}

// ---- criterion 2 ----------------------------------------------------------

bool criterion2(std::vector<std::string>& notes) {
  constexpr double kTol = 0.01;
  constexpr double kExact = 1e-9;

  const auto p = line4_problem();
  const auto es = net::build_error_system(p);
  bool ok = true;

  MatrixXd phat = MatrixXd::Zero(3, 3);
  phat.diagonal() << 0.39, 0.37, 0.39;
  const MatrixXd ke = -es.rhat.llt().solve(es.btil.transpose() * phat);
  const MatrixXd kx =
      net::kx_from_ke(ke, graph::sparsity_pattern(p.topology), 1, 1);
  const auto given = synth::certify_protocol(p, kx);
  ok = ok && std::abs(given.jactual - 0.89) <= kTol;
  notes.push_back("given diagonal design: exact cost " + fmt(given.jactual) +
                  " (target 0.89 +- " + fmt(kTol) + ")");

  const auto base = synth::baseline_protocol(p);
  ok = ok && std::abs(base.jactual - 0.92) <= kTol;
  ok = ok && std::abs(base.c - 0.5) <= kExact;
  ok = ok && std::abs(base.p - 2.61) <= kTol;
  notes.push_back("comparison design: cost " + fmt(base.jactual) +
                  " (target 0.92), c " + fmt(base.c) + " (0.5 exact), p " +
                  fmt(base.p) + " (target 2.61)");

  const auto synth_res = synth::design_protocol(p);
  const double radius = base.radius_for(synth_res.gamma);
  ok = ok && std::abs(radius - 0.65) <= kTol;
  ok = ok && std::abs(base.x0_norm - 0.74) <= kTol;
  ok = ok && radius < base.x0_norm;
  notes.push_back("guarantee radius " + fmt(radius) +
                  " (target 0.65) against initial state norm " +
                  fmt(base.x0_norm) + " (target 0.74)");
  return ok;
}

// ---- criterion 3 ----------------------------------------------------------

bool criterion3(std::vector<std::string>& notes) {
  constexpr double kCostTarget = 2.48;
  constexpr double kCostTol = 0.05;
  constexpr double kMetricLimit = 1e-3;
  constexpr double kHorizon = 20.0;
  constexpr double kStep = 0.001;

  const auto p = rollers_problem();
  const auto es = net::build_error_system(p);
  const MatrixXd ke = published_roller_ke();
  const MatrixXd kx =
      net::kx_from_ke(ke, graph::sparsity_pattern(p.topology), 3, 1);
  // The printed entries are rounded, so no structured multiplier reproduces
  // them exactly; the cost comes straight from the Lyapunov route.
  const double jhat = synth::cost_of_gain(es, ke);
  const bool cost_ok = std::abs(jhat - kCostTarget) <= kCostTol;
  notes.push_back("printed gain exact cost " + fmt(jhat) + " (target " +
                  fmt(kCostTarget) + " +- " + fmt(kCostTol) + ")" +
                  (cost_ok ? "" : "  <-- out of tolerance"));

  const auto traj = sim::simulate(p, kx, kHorizon, kStep);
  const auto rep = sim::report(p, traj);
  const bool metric_ok = rep.metric_final < kMetricLimit;
  notes.push_back("consensus metric at t = " + fmt(kHorizon) + ": " +
                  fmt(rep.metric_final) + " (required < " +
                  fmt(kMetricLimit) + ")" +
                  (metric_ok ? "" : "  <-- not met"));
  if (!metric_ok) {
    linalg::Spectrum cl;
    linalg::is_hurwitz(net::closed_loop_error_matrix(es, ke), 1e-8, &cl);
    notes.push_back("slowest closed-loop mode has real part " +
                    fmt(cl.max_real) +
                    ", so the metric cannot decay below the limit within "
                    "this horizon");
  }
  return cost_ok && metric_ok;
}

// ---- criterion 4 ----------------------------------------------------------

bool criterion4(std::vector<std::string>& notes) {
  constexpr double kRel = 1e-4;
  constexpr double kEndTol = 0.01;

  bool ok = true;
  VectorXd x0(1);
  x0 << 3.0;

  const MatrixXd p1 = linalg::care_solve(scalar(0.0), scalar(1.0),
                                         scalar(1.0), scalar(1.0));
  const double j1 = x0.dot(p1 * x0);
  ok = ok && std::abs(j1 - 9.0) <= kRel * 9.0;
  notes.push_back("integrator optimum " + fmt(j1) + " (exact 9)");

  const MatrixXd p2 = linalg::care_solve(scalar(-1.0), scalar(1.0),
                                         scalar(1.0), scalar(1.0));
  const double j2 = x0.dot(p2 * x0);
  const double j2_exact = 9.0 * (std::sqrt(2.0) - 1.0);
  ok = ok && std::abs(j2 - j2_exact) <= kRel * j2_exact;
  ok = ok && std::llround(j2 * 100.0) == 373;
  notes.push_back("stable-plant optimum " + fmt(j2) + " (exact " +
                  fmt(j2_exact) + ", rounds to 3.73)");

  // Convexity region of the scalar stable plant, by sweep.
  const MatrixXd a = scalar(-1.0), one = scalar(1.0);
  double lo = 1e9, hi = -1e9;
  for (double p = -3.0; p <= 1.0 + 1e-12; p += 1e-3) {
    if (linalg::psd_margin(sdp::assemble_convexity(a, one, one, one,
                                                   scalar(p))) >= 0.0) {
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
  }
  const double lo_exact = -1.0 - std::sqrt(2.0);
  const double hi_exact = std::sqrt(2.0) - 1.0;
  ok = ok && std::abs(lo - lo_exact) <= kEndTol &&
       std::abs(hi - hi_exact) <= kEndTol;
  notes.push_back("convexity region [" + fmt(lo) + ", " + fmt(hi) +
                  "] (expected [" + fmt(lo_exact) + ", " + fmt(hi_exact) +
                  "])");

  // Intersection with the bounded stable-branch condition: a shifted
  // certificate must exist below the cost cap x0' Pbar x0 < 5.
  double ilo = 1e9, ihi = -1e9;
  for (double p = 0.0; p <= 1.0 + 1e-12; p += 1e-3) {
    if (linalg::psd_margin(sdp::assemble_convexity(a, one, one, one,
                                                   scalar(p))) < 0.0) {
      continue;
    }
    bool exists = false;
    for (double pb = 0.5005; 9.0 * pb < 5.0; pb += 2e-4) {
      MatrixXd blk(2, 2);
      blk << 2.0 * pb - 1.0, 2.0 * (p - pb), 2.0 * (p - pb), 4.0;
      if (linalg::psd_margin(blk) >= 0.0) {
        exists = true;
        break;
      }
    }
    if (exists) {
      ilo = std::min(ilo, p);
      ihi = std::max(ihi, p);
    }
  }
  ok = ok && std::abs(ilo - 0.22) <= kEndTol && std::abs(ihi - 0.41) <= kEndTol;
  notes.push_back("capped stabilizing range [" + fmt(ilo) + ", " + fmt(ihi) +
                  "] (expected [0.22, 0.41])");
  return ok;
}

// ---- criterion 5 ----------------------------------------------------------

struct InvariantCheck {
  bool ran = false;
  bool ok = true;
  std::string why;
};

InvariantCheck check_synthesis(const net::MasProblem& p) {
  InvariantCheck c;
  synth::ConsensusResult res;
  try {
    res = synth::design_protocol(p);
  } catch (const InfeasibleError&) {
    return c;
  } catch (const NumericalError&) {
    return c;
  }
  c.ran = true;
  auto fail = [&c](const std::string& why) {
    c.ok = false;
    if (!c.why.empty()) c.why += "; ";
    c.why += why;
  };
  if (!(res.closed_loop.max_real < 0.0)) fail("closed loop not Hurwitz");
  const auto sub = structure::admissible_subspace(p.topology, p.n(), p.m());
  if (!structure::validate_gain_structure(sub, res.ke)) {
    fail("gain violates the interaction structure");
  }
  const MatrixXd ke_back =
      net::ke_from_kx(res.kx, p.n(), p.m(), p.n_agents());
  if ((ke_back - res.ke).cwiseAbs().maxCoeff() > 1e-8) {
    fail("stacked gain does not round-trip");
  }
  if (!(res.jactual < res.gamma)) fail("cost bound is not strict");
  for (double e : res.cert.block_min_eig) {
    if (!(e >= 0.5 * res.cert.delta - 1e-15)) {
      fail("verifier margin below half delta");
      break;
    }
  }
  return c;
}

bool criterion5(std::vector<std::string>& notes) {
  constexpr int kRandomTrials = 100;
  constexpr int kMinSuccesses = 70;

  bool ok = true;

  struct Example {
    const char* name;
    net::MasProblem problem;
    double soft_hi;  // <= 0 means no soft range given
  };
  std::vector<Example> examples;
  examples.push_back({"line of four integrators", line4_problem(), 1.5});
  examples.push_back({"coupled oscillators", oscillators_problem(), 0.0});
  examples.push_back({"ring of four integrators", ring4_problem(), 8.0});
  examples.push_back({"mesh of four integrators", mesh4_problem(), 0.0});
  examples.push_back({"roller network", rollers_problem(), 0.0});

  for (auto& ex : examples) {
    const auto c = check_synthesis(ex.problem);
    if (!c.ran || !c.ok) {
      ok = false;
      notes.push_back(std::string(ex.name) + ": " +
                      (c.ran ? c.why : "synthesis did not complete") +
                      "  <-- violation");
      continue;
    }
    const auto res = synth::design_protocol(ex.problem);
    std::string line = std::string(ex.name) + ": cost " + fmt(res.jactual) +
                       " < bound " + fmt(res.gamma);
    if (ex.soft_hi > 0.0 &&
        !(res.gamma >= res.jactual && res.gamma <= ex.soft_hi)) {
      line += "  (outside soft range, flagged only)";
    }
    notes.push_back(line);
  }

  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int successes = 0, violations = 0;
  for (int trial = 0; trial < kRandomTrials; ++trial) {
    const int na = 2 + static_cast<int>(rng() % 4);
    const int n = 1 + static_cast<int>(rng() % 2);
    const int m = 1 + static_cast<int>(rng() % n);

    MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = u(rng);
    const MatrixXd q_basis = Eigen::HouseholderQR<MatrixXd>(g).householderQ();
    VectorXd evals(n);
    for (int i = 0; i < n; ++i) evals(i) = -unit(rng);
    const MatrixXd a =
        q_basis * evals.asDiagonal() * q_basis.transpose();

    std::vector<MatrixXd> b;
    for (int i = 0; i < na; ++i) {
      MatrixXd bi(n, m);
      do {
        for (int r = 0; r < n; ++r)
          for (int cc = 0; cc < m; ++cc) bi(r, cc) = u(rng);
      } while (Eigen::FullPivLU<MatrixXd>(bi).rank() < m);
      b.push_back(bi);
    }

    std::vector<std::pair<int, int>> edges;
    for (int k = 2; k <= na; ++k) {
      edges.emplace_back(1 + static_cast<int>(rng() % (k - 1)), k);
    }
    for (int i = 1; i <= na; ++i) {
      for (int j = i + 1; j <= na; ++j) {
        bool present = false;
        for (const auto& e : edges) {
          present = present || (e.first == i && e.second == j);
        }
        if (!present && unit(rng) < 0.3) edges.emplace_back(i, j);
      }
    }

    MatrixXd w(n, n), v(m, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w(i, j) = u(rng);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) v(i, j) = u(rng);
    const MatrixXd qu =
        w.transpose() * w + 0.1 * MatrixXd::Identity(n, n);
    const MatrixXd ru =
        v.transpose() * v + 0.1 * MatrixXd::Identity(m, m);

    VectorXd x0(n * na);
    for (int i = 0; i < x0.size(); ++i) x0(i) = u(rng);

    net::MasProblem p{a,  std::move(b), qu, ru,
                      graph::Topology(na, std::move(edges)), std::move(x0)};
    const auto c = check_synthesis(p);
    if (c.ran) ++successes;
    if (c.ran && !c.ok) {
      ++violations;
      if (violations <= 3) {
        notes.push_back("random trial " + std::to_string(trial) + ": " +
                        c.why + "  <-- violation");
      }
    }
  }
  notes.push_back("random problems: " + std::to_string(successes) + "/" +
                  std::to_string(kRandomTrials) + " synthesized, " +
                  std::to_string(violations) + " invariant violations");
  ok = ok && violations == 0 && successes >= kMinSuccesses;
  return ok;
}

// ---- criterion 6 ----------------------------------------------------------

bool criterion6(std::vector<std::string>& notes) {
  constexpr int kTrials = 50;
  bool ok = true;

  VectorXd x0(1);
  x0 << 3.0;
  sdp::SymVar pbar;
  sdp::SdpModel stable = sdp::lmi_pbar_stable(
      scalar(0.0), scalar(1.0), scalar(1.0), scalar(1.0), scalar(0.99), x0,
      &pbar);
  const auto sol = sdp::solve(stable);
  ok = ok && sol.status == sdp::SdpStatus::infeasible;
  notes.push_back(std::string("integrator stable-branch program: ") +
                  sdp::to_string(sol.status) + " (expected infeasible)");

  const auto law = synth::design_lqr(scalar(0.0), scalar(1.0), scalar(1.0),
                                     scalar(1.0), x0);
  const bool chain = law.jstar <= law.jactual && law.jactual < law.bound;
  ok = ok && chain && !law.stable_branch;
  notes.push_back("shifted branch law: optimum " + fmt(law.jstar) +
                  " <= cost " + fmt(law.jactual) + " < bound " +
                  fmt(law.bound));

  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int mismatches = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = u(rng);
    const double max_re = linalg::spectrum(a).max_real;
    const bool want_hurwitz = trial % 2 == 0;
    const double shift = want_hurwitz ? -(max_re + 0.2 + 0.8 * unit(rng))
                                      : (0.2 + 0.8 * unit(rng)) - max_re;
    a += shift * MatrixXd::Identity(n, n);
    const bool hurwitz = linalg::is_hurwitz(a);

    MatrixXd b(n, 1);
    do {
      for (int i = 0; i < n; ++i) b(i, 0) = u(rng);
    } while (b.norm() < 0.3);
    const MatrixXd q = MatrixXd::Identity(n, n);

    // For a stable plant a certificate is known to exist at the Lyapunov
    // point; for an unstable one no choice of p can work, so a random
    // symmetric p must come back infeasible.
    MatrixXd p(n, n);
    if (hurwitz) {
      p = linalg::lyap_solve(a, 2.0 * MatrixXd::Identity(n, n));
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) p(i, j) = p(j, i) = u(rng);
    }

    VectorXd xr = VectorXd::Ones(n);
    sdp::SymVar pb;
    sdp::SdpModel model =
        sdp::lmi_pbar_stable(a, b, q, scalar(1.0), p, xr, &pb);
    const auto s = sdp::solve(model);
    const bool feasible = s.status == sdp::SdpStatus::optimal;
    const bool infeasible = s.status == sdp::SdpStatus::infeasible;
    if (!((hurwitz && feasible) || (!hurwitz && infeasible))) {
      ++mismatches;
      if (mismatches <= 3) {
        notes.push_back("trial " + std::to_string(trial) + ": max Re " +
                        fmt(linalg::spectrum(a).max_real) + " but solver said " +
                        sdp::to_string(s.status) + "  <-- mismatch");
      }
    }
  }
  notes.push_back("stable-branch feasibility matched open-loop stability in " +
                  std::to_string(kTrials - mismatches) + "/" +
                  std::to_string(kTrials) + " trials");
  return ok && mismatches == 0;
}

// ---- criterion 7 ----------------------------------------------------------

bool criterion7(std::vector<std::string>& notes) {
  constexpr double kRel = 1e-3;
  constexpr double kZeroBlock = 1e-10;
  constexpr double kIdentity = 1e-9;
  bool ok = true;

  struct Example {
    const char* name;
    net::MasProblem problem;
  };
  std::vector<Example> examples;
  examples.push_back({"line of four integrators", line4_problem()});
  examples.push_back({"coupled oscillators", oscillators_problem()});
  examples.push_back({"ring of four integrators", ring4_problem()});
  examples.push_back({"mesh of four integrators", mesh4_problem()});
  examples.push_back({"roller network", rollers_problem()});

  for (auto& ex : examples) {
    const auto es = net::build_error_system(ex.problem);
    if (!(es.qtil_discard_norm < kZeroBlock)) {
      ok = false;
      notes.push_back(std::string(ex.name) +
                      ": dropped weight block is not zero  <-- violation");
    }
    const auto res = synth::design_protocol(ex.problem);
    const MatrixXd ke =
        net::ke_from_kx(res.kx, ex.problem.n(), ex.problem.m(),
                        ex.problem.n_agents());
    const MatrixXd acl = net::closed_loop_error_matrix(es, ke);
    const MatrixXd y = linalg::lyap_solve(
        acl, es.qtil + ke.transpose() * es.rhat * ke);
    const auto traj = sim::simulate(ex.problem, res.kx, 20.0, 0.001);
    const auto rep = sim::report(ex.problem, traj, &y);
    const double rel =
        std::abs(res.jactual - (rep.j_quad + rep.tail)) / res.jactual;
    const bool hit = rel < kRel;
    ok = ok && hit;
    notes.push_back(std::string(ex.name) + ": response cost " +
                    fmt(res.jactual) + " vs quadrature plus tail " +
                    fmt(rep.j_quad + rep.tail) + " (relative gap " +
                    fmt(rel) + ")" + (hit ? "" : "  <-- violation"));
  }

  // Coordinate decomposition: stacking the consecutive differences with the
  // last agent state and mapping back must reproduce the state exactly.
  std::mt19937 rng(97);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst_decomp = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int na = 2 + static_cast<int>(rng() % 4);
    const int n = 1 + static_cast<int>(rng() % 3);
    VectorXd x(n * na);
    for (int i = 0; i < x.size(); ++i) x(i) = u(rng);
    VectorXd stacked(n * na);
    for (int i = 0; i < na - 1; ++i) {
      stacked.segment(i * n, n) =
          x.segment(i * n, n) - x.segment((i + 1) * n, n);
    }
    stacked.tail(n) = x.tail(n);
    const VectorXd back = graph::delta(n, na) * stacked;
    worst_decomp = std::max(worst_decomp, (back - x).cwiseAbs().maxCoeff());
  }
  ok = ok && worst_decomp < kIdentity;
  notes.push_back("coordinate decomposition round-trip error " +
                  fmt(worst_decomp));

  // Cost identity: the pairwise disagreement cost equals the reduced
  // quadratic form for any state.
  double worst_cost = 0.0;
  std::vector<net::MasProblem> cost_problems;
  cost_problems.push_back(line4_problem());
  cost_problems.push_back(ring4_problem());
  cost_problems.push_back(mesh4_problem());
  cost_problems.push_back(oscillators_problem());
  for (auto& p : cost_problems) {
    const auto es = net::build_error_system(p);
    const int n = p.n();
    const int na = p.n_agents();
    for (int trial = 0; trial < 20; ++trial) {
      VectorXd x(n * na);
      for (int i = 0; i < x.size(); ++i) x(i) = u(rng);
      double lhs = 0.0;
      for (int i = 1; i <= na; ++i) {
        for (int j : p.topology.neighbors(i)) {
          const VectorXd d =
              x.segment((i - 1) * n, n) - x.segment((j - 1) * n, n);
          lhs += 0.5 * d.dot(p.qu * d);
        }
      }
      VectorXd e(n * (na - 1));
      for (int i = 0; i < na - 1; ++i) {
        e.segment(i * n, n) = x.segment(i * n, n) - x.segment((i + 1) * n, n);
      }
      const double rhs = e.dot(es.qtil * e);
      worst_cost = std::max(worst_cost,
                            std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
  }
  ok = ok && worst_cost < kIdentity;
  notes.push_back("disagreement cost identity error " + fmt(worst_cost));

  // Quadratic-gain operator: transpose swap and same-argument positivity.
  double worst_t = 0.0, worst_psd = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    MatrixXd psi(n, n), phi(n, n), broot(n, 2);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        psi(i, j) = u(rng);
        phi(i, j) = u(rng);
      }
      broot(i, 0) = u(rng);
      broot(i, 1) = u(rng);
    }
    const MatrixXd xi = broot * broot.transpose();
    const MatrixXd lhs = linalg::upsilon(psi, phi, xi).transpose();
    const MatrixXd rhs = linalg::upsilon(phi, psi, xi);
    worst_t = std::max(worst_t, (lhs - rhs).cwiseAbs().maxCoeff());
    worst_psd = std::max(
        worst_psd, -linalg::psd_margin(linalg::upsilon(psi, psi, xi)));
  }
  ok = ok && worst_t < 1e-10 && worst_psd < 1e-10;
  notes.push_back("quadratic-gain operator transpose gap " + fmt(worst_t) +
                  ", same-argument definiteness margin " + fmt(-worst_psd));
  return ok;
}

// ---- driver ----------------------------------------------------------------

struct Criterion {
  int id;
  const char* label;
  bool (*fn)(std::vector<std::string>&);
};

const Criterion kCriteria[] = {
    {1, "relative-state protocol costs across coupling strengths", criterion1},
    {2, "given-gain cost, comparison design, and guarantee radius",
     criterion2},
    {3, "roller network: printed-gain cost and consensus decay", criterion3},
    {4, "single-agent optima and scalar feasibility regions", criterion4},
    {5, "synthesis invariants on examples and randomized problems",
     criterion5},
    {6, "stable-branch feasibility matches open-loop stability", criterion6},
    {7, "independent numerical cross-checks", criterion7},
};

}  // namespace

int main(int argc, char** argv) {
  int which = 0;
  if (argc > 1) {
    which = std::atoi(argv[1]);
    if (which < 1 || which > 7) {
      std::fprintf(stderr, "usage: %s [criterion 1..7]\n", argv[0]);
      return 1;
    }
  }
  bool all_ok = true;
  for (const auto& c : kCriteria) {
    if (which != 0 && c.id != which) continue;
    std::vector<std::string> notes;
    bool ok = false;
    try {
      ok = c.fn(notes);
    } catch (const std::exception& e) {
      notes.push_back(std::string("unexpected exception: ") + e.what());
    }
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", c.id,
                c.label);
    for (const auto& n : notes) std::printf("    %s\n", n.c_str());
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
