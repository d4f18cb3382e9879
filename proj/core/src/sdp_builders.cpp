#include <string>
#include <vector>

#include "subopt/sdp.hpp"
#include "subopt/structure.hpp"

namespace subopt::sdp {

namespace {

// k-th symmetric basis matrix in vec_sym order: for entry (i,j), i <= j,
// ones at (i,j) and (j,i).
MatrixXd sym_basis(int q, int i, int j) {
  MatrixXd e = MatrixXd::Zero(q, q);
  e(i, j) = 1.0;
  e(j, i) = 1.0;
  return e;
}

template <typename Fn>
void for_each_sym_entry(int q, Fn&& fn) {
  int k = 0;
  for (int j = 0; j < q; ++j)
    for (int i = 0; i <= j; ++i) fn(k++, i, j);
}

}  // namespace

MatrixXd assemble_convexity(const MatrixXd& a, const MatrixXd& b,
                            const MatrixXd& q, const MatrixXd& r,
                            const MatrixXd& p) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  MatrixXd blk(n + m, n + m);
  blk.topLeftCorner(n, n) = a.transpose() * p + p * a + q;
  blk.topRightCorner(n, m) = (p + p.transpose()) * b;
  blk.bottomLeftCorner(m, n) = b.transpose() * (p + p.transpose());
  blk.bottomRightCorner(m, m) = 4.0 * r;
  return blk;
}

SdpModel lmi_convexity(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                       const MatrixXd& r, double p_box, SymVar* p_var,
                       int* margin_var) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  SdpModel model;
  SymVar p = model.add_sym_var("P", n);
  const int s = model.add_var("margin");

  LmiBlock& blk = model.add_block("convexity", n + m);
  blk.f0.setZero();
  blk.f0.topLeftCorner(n, n) = q;
  blk.f0.bottomRightCorner(m, m) = 4.0 * r;
  for_each_sym_entry(n, [&](int k, int i, int j) {
    const MatrixXd e = sym_basis(n, i, j);
    MatrixXd c = MatrixXd::Zero(n + m, n + m);
    c.topLeftCorner(n, n) = a.transpose() * e + e * a;
    c.topRightCorner(n, m) = 2.0 * e * b;
    c.bottomLeftCorner(m, n) = 2.0 * b.transpose() * e;
    blk.vars.push_back(p.offset + k);
    blk.coeff.push_back(std::move(c));
  });
  blk.vars.push_back(s);
  blk.coeff.push_back(-MatrixXd::Identity(n + m, n + m));

  for_each_sym_entry(n, [&](int k, int, int) {
    LmiBlock& hi = model.add_block("P_upper_" + std::to_string(k), 1);
    hi.f0(0, 0) = p_box;
    hi.vars.push_back(p.offset + k);
    hi.coeff.push_back(-MatrixXd::Identity(1, 1));
    LmiBlock& lo = model.add_block("P_lower_" + std::to_string(k), 1);
    lo.f0(0, 0) = p_box;
    lo.vars.push_back(p.offset + k);
    lo.coeff.push_back(MatrixXd::Identity(1, 1));
  });

  model.set_objective_term(s, -1.0);
  model.finalize();
  if (p_var) *p_var = p;
  if (margin_var) *margin_var = s;
  return model;
}

SdpModel lmi_pbar_stable(const MatrixXd& a, const MatrixXd& b,
                         const MatrixXd& q, const MatrixXd& r,
                         const MatrixXd& p, const VectorXd& x0,
                         SymVar* pbar_var) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  SdpModel model;
  SymVar pbar = model.add_sym_var("Pbar", n);

  LmiBlock& blk = model.add_block("stability", n + m);
  blk.f0.setZero();
  blk.f0.topLeftCorner(n, n) = -q;
  blk.f0.topRightCorner(n, m) = (p + p.transpose()) * b;
  blk.f0.bottomLeftCorner(m, n) = b.transpose() * (p + p.transpose());
  blk.f0.bottomRightCorner(m, m) = 4.0 * r;
  for_each_sym_entry(n, [&](int k, int i, int j) {
    const MatrixXd e = sym_basis(n, i, j);
    MatrixXd c = MatrixXd::Zero(n + m, n + m);
    c.topLeftCorner(n, n) = -(a.transpose() * e + e * a);
    c.topRightCorner(n, m) = -2.0 * e * b;
    c.bottomLeftCorner(m, n) = -2.0 * b.transpose() * e;
    blk.vars.push_back(pbar.offset + k);
    blk.coeff.push_back(std::move(c));
  });

  LmiBlock& pd = model.add_block("Pbar_pd", n);
  pd.f0.setZero();
  for_each_sym_entry(n, [&](int k, int i, int j) {
    pd.vars.push_back(pbar.offset + k);
    pd.coeff.push_back(sym_basis(n, i, j));
  });

  for_each_sym_entry(n, [&](int k, int i, int j) {
    const double w = (i == j) ? x0(i) * x0(i) : 2.0 * x0(i) * x0(j);
    if (w != 0.0) model.set_objective_term(pbar.offset + k, w);
  });
  model.finalize();
  if (pbar_var) *pbar_var = pbar;
  return model;
}

SdpModel lmi_eta(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                 const MatrixXd& r, const MatrixXd& p, SymVar* pbar_var,
                 int* eta_var) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  SdpModel model;
  SymVar pbar = model.add_sym_var("Pbar", n);
  const int eta = model.add_var("eta");

  LmiBlock& blk = model.add_block("shifted_stability", n + m);
  blk.f0.setZero();
  blk.f0.topLeftCorner(n, n) = -q;
  blk.f0.topRightCorner(n, m) = (p + p.transpose()) * b;
  blk.f0.bottomLeftCorner(m, n) = b.transpose() * (p + p.transpose());
  blk.f0.bottomRightCorner(m, m) = 4.0 * r;
  for_each_sym_entry(n, [&](int k, int i, int j) {
    const MatrixXd e = sym_basis(n, i, j);
    MatrixXd c = MatrixXd::Zero(n + m, n + m);
    c.topLeftCorner(n, n) = -(a.transpose() * e + e * a);
    c.topRightCorner(n, m) = -2.0 * e * b;
    c.bottomLeftCorner(m, n) = -2.0 * b.transpose() * e;
    blk.vars.push_back(pbar.offset + k);
    blk.coeff.push_back(std::move(c));
  });
  {
    MatrixXd c = MatrixXd::Zero(n + m, n + m);
    c.topLeftCorner(n, n) = MatrixXd::Identity(n, n);
    blk.vars.push_back(eta);
    blk.coeff.push_back(std::move(c));
  }

  LmiBlock& pd = model.add_block("Pbar_pd", n);
  pd.f0.setZero();
  for_each_sym_entry(n, [&](int k, int i, int j) {
    pd.vars.push_back(pbar.offset + k);
    pd.coeff.push_back(sym_basis(n, i, j));
  });

  model.set_objective_term(eta, 1.0);
  model.finalize();
  if (pbar_var) *pbar_var = pbar;
  if (eta_var) *eta_var = eta;
  return model;
}

namespace {

// Shared assembly of the two consensus blocks over P hat and P bar hat.
void add_consensus_blocks(SdpModel& model, const net::ErrorSystem& es,
                          const SymVar& phat, const SymVar& pbarhat, int eta) {
  const int q = static_cast<int>(es.atil.rows());
  const int mm = static_cast<int>(es.btil.cols());
  const MatrixXd& at = es.atil;
  const MatrixXd& bt = es.btil;

  LmiBlock& gain = model.add_block("gain_feasibility", q + mm);
  gain.f0.setZero();
  gain.f0.topLeftCorner(q, q) = es.qtil;
  gain.f0.bottomRightCorner(mm, mm) = es.rhat;
  for_each_sym_entry(q, [&](int k, int i, int j) {
    const MatrixXd e = sym_basis(q, i, j);
    MatrixXd c = MatrixXd::Zero(q + mm, q + mm);
    c.topLeftCorner(q, q) = at.transpose() * e + e * at;
    c.topRightCorner(q, mm) = e * bt;
    c.bottomLeftCorner(mm, q) = bt.transpose() * e;
    gain.vars.push_back(phat.offset + k);
    gain.coeff.push_back(std::move(c));
  });

  LmiBlock& bound = model.add_block("bound", q + mm);
  bound.f0.setZero();
  bound.f0.topLeftCorner(q, q) = -es.qtil;
  bound.f0.bottomRightCorner(mm, mm) = es.rhat;
  for_each_sym_entry(q, [&](int k, int i, int j) {
    const MatrixXd e = sym_basis(q, i, j);
    MatrixXd cp = MatrixXd::Zero(q + mm, q + mm);
    cp.topRightCorner(q, mm) = e * bt;
    cp.bottomLeftCorner(mm, q) = bt.transpose() * e;
    bound.vars.push_back(phat.offset + k);
    bound.coeff.push_back(std::move(cp));
    MatrixXd cb = MatrixXd::Zero(q + mm, q + mm);
    cb.topLeftCorner(q, q) = -(at.transpose() * e + e * at);
    cb.topRightCorner(q, mm) = -e * bt;
    cb.bottomLeftCorner(mm, q) = -bt.transpose() * e;
    bound.vars.push_back(pbarhat.offset + k);
    bound.coeff.push_back(std::move(cb));
  });
  {
    MatrixXd c = MatrixXd::Zero(q + mm, q + mm);
    c.topLeftCorner(q, q) = MatrixXd::Identity(q, q);
    bound.vars.push_back(eta);
    bound.coeff.push_back(std::move(c));
  }
}

}  // namespace

SdpModel lmi_consensus(const net::ErrorSystem& es,
                       const structure::PConstraintSet& pcon, SymVar* phat_var,
                       SymVar* pbarhat_var, int* eta_var) {
  const int q = static_cast<int>(es.atil.rows());
  SdpModel model;
  SymVar phat = model.add_sym_var("Phat", q);
  SymVar pbarhat = model.add_sym_var("Pbarhat", q);
  const int eta = model.add_var("eta");

  add_consensus_blocks(model, es, phat, pbarhat, eta);

  LmiBlock& pd = model.add_block("Pbarhat_pd", q);
  pd.f0.setZero();
  for_each_sym_entry(q, [&](int k, int i, int j) {
    pd.vars.push_back(pbarhat.offset + k);
    pd.coeff.push_back(sym_basis(q, i, j));
  });

  const int sd = structure::sym_dim(q);
  for (int row = 0; row < pcon.c.rows(); ++row) {
    VectorXd lhs = VectorXd::Zero(model.num_vars());
    lhs.segment(phat.offset, sd) = pcon.c.row(row).transpose();
    model.add_equality(lhs, 0.0);
  }

  model.set_objective_term(eta, 1.0);
  model.finalize();
  if (phat_var) *phat_var = phat;
  if (pbarhat_var) *pbarhat_var = pbarhat;
  if (eta_var) *eta_var = eta;
  return model;
}

SdpModel lmi_bound_given_gain(const net::ErrorSystem& es, const MatrixXd& ke,
                              SymVar* phat_var, SymVar* pbarhat_var,
                              int* eta_var) {
  const int q = static_cast<int>(es.atil.rows());
  const int mm = static_cast<int>(es.btil.cols());
  SdpModel model;
  SymVar phat = model.add_sym_var("Phat", q);
  SymVar pbarhat = model.add_sym_var("Pbarhat", q);
  const int eta = model.add_var("eta");

  add_consensus_blocks(model, es, phat, pbarhat, eta);

  // Pin the gain: btil^T Phat = -rhat ke, entry by entry.
  const int sd = structure::sym_dim(q);
  std::vector<MatrixXd> maps(sd);
  for_each_sym_entry(q, [&](int k, int i, int j) {
    maps[k] = es.btil.transpose() * sym_basis(q, i, j);
  });
  const MatrixXd rhs = -es.rhat * ke;
  for (int r = 0; r < mm; ++r) {
    for (int c = 0; c < q; ++c) {
      VectorXd lhs = VectorXd::Zero(model.num_vars());
      for (int k = 0; k < sd; ++k) lhs(phat.offset + k) = maps[k](r, c);
      model.add_equality(lhs, rhs(r, c));
    }
  }

  model.set_objective_term(eta, 1.0);
  model.finalize();
  if (phat_var) *phat_var = phat;
  if (pbarhat_var) *pbarhat_var = pbarhat;
  if (eta_var) *eta_var = eta;
  return model;
}

}  // namespace subopt::sdp
