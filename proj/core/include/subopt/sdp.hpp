#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "subopt/network.hpp"
#include "subopt/structure.hpp"

namespace subopt::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Handle to a symmetric matrix variable: q(q+1)/2 consecutive scalars in
// vec_sym order starting at offset.
struct SymVar {
  std::string name;
  int dim = 0;
  int offset = 0;
};

// One affine constraint block: f0 + sum_k y[vars[k]] * coeff[k] >= delta * I.
struct LmiBlock {
  std::string name;
  int dim = 0;
  MatrixXd f0;
  std::vector<int> vars;
  std::vector<MatrixXd> coeff;
};

// min c^T y  s.t.  every block >= delta I,  eq_lhs y = eq_rhs.
class SdpModel {
 public:
  int num_vars() const { return static_cast<int>(var_names_.size()); }
  const std::vector<std::string>& var_names() const { return var_names_; }
  const std::vector<LmiBlock>& blocks() const { return blocks_; }
  const std::vector<VectorXd>& eq_lhs() const { return eq_lhs_; }
  const std::vector<double>& eq_rhs() const { return eq_rhs_; }
  const VectorXd objective() const;
  double delta() const { return delta_; }
  void set_delta(double d) { delta_ = d; }

  int add_var(const std::string& name);
  SymVar add_sym_var(const std::string& name, int dim);

  LmiBlock& add_block(const std::string& name, int dim);
  void add_equality(const VectorXd& lhs, double rhs);
  void set_objective_term(int var, double coeff);

  // Affine helpers for blocks over a symmetric matrix variable.
  MatrixXd sym_value(const SymVar& v, const VectorXd& y) const;
  MatrixXd block_value(const LmiBlock& b, const VectorXd& y) const;

  // Largest absolute entry over all block data; delta defaults to
  // 1e-6 * (1 + data magnitude) when finalize() is called with no explicit
  // delta set.
  void finalize();

  std::string dump() const;  // plain-text rendering for debugging

 private:
  std::vector<std::string> var_names_;
  std::vector<LmiBlock> blocks_;
  std::vector<VectorXd> eq_lhs_;
  std::vector<double> eq_rhs_;
  std::vector<std::pair<int, double>> objective_;
  double delta_ = -1.0;
};

enum class SdpStatus { optimal, infeasible, numerical_failure };

struct SdpSolution {
  SdpStatus status = SdpStatus::numerical_failure;
  VectorXd y;
  double objective = 0.0;
  std::vector<double> block_min_eig;  // from the independent verifier
  std::vector<double> eq_residual;
  int newton_iters = 0;
  std::string note;
};

struct SolveOptions {
  double accuracy = 1e-8;
  int max_newton = 4000;
  double tau0 = 1.0;
  double tau_mult = 10.0;
  double var_box = 1e7;  // recession safeguard |y_k| <= var_box * scale
};

const char* to_string(SdpStatus s);

// Deterministic interior-point solve. Infeasibility is reported through the
// status, never an exception. A solution is marked optimal only after the
// independent verifier accepts it.
SdpSolution solve(const SdpModel& model, const SolveOptions& opts = {});

// Recomputes every block eigenvalue and equality residual from the model
// data. Returns true when all block minimum eigenvalues are >= delta/2 and
// all equality residuals are < 1e-7 * (1 + |rhs|).
bool verify(const SdpModel& model, const VectorXd& y,
            std::vector<double>* block_min_eig, std::vector<double>* eq_residual);

// ---- Builders ----------------------------------------------------------
// Each assembles the printed two-by-two block inequality without algebraic
// simplification.

// [[ Gamma(P), (P+P^T)B ], [ B^T(P+P^T), 4R ]] >= delta I, P free symmetric.
// Adds a margin variable s (objective max s) plus |P| box blocks so the
// model doubles as a max-margin program; margin_var receives s's index.
SdpModel lmi_convexity(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                       const MatrixXd& r, double p_box, SymVar* p_var,
                       int* margin_var);

// Same block with P fixed, for scalar sweeps and line searches.
MatrixXd assemble_convexity(const MatrixXd& a, const MatrixXd& b,
                            const MatrixXd& q, const MatrixXd& r,
                            const MatrixXd& p);

// [[ -Gamma(Pbar), (P+P^T-2Pbar)B ], [ ., 4R ]] >= delta I, Pbar >= delta I,
// P fixed; objective min x0^T Pbar x0.
SdpModel lmi_pbar_stable(const MatrixXd& a, const MatrixXd& b,
                         const MatrixXd& q, const MatrixXd& r,
                         const MatrixXd& p, const VectorXd& x0, SymVar* pbar_var);

// min eta s.t. [[ -Gamma(Pbar)+eta I, (P+P^T-2Pbar)B ], [ ., 4R ]] >= delta I,
// Pbar >= delta I, P fixed.
SdpModel lmi_eta(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                 const MatrixXd& r, const MatrixXd& p, SymVar* pbar_var,
                 int* eta_var);

// min eta over Phat in the admissible set, Pbarhat >= delta I:
//   [[ Gammabar(Phat), Phat Btil ], [ Btil^T Phat, Rhat ]] >= delta I
//   [[ -Gammabar(Pbarhat)+eta I, (Phat-Pbarhat)Btil ], [ ., Rhat ]] >= delta I
SdpModel lmi_consensus(const net::ErrorSystem& es,
                       const structure::PConstraintSet& pcon, SymVar* phat_var,
                       SymVar* pbarhat_var, int* eta_var);

// Same two blocks with the equality Btil^T Phat = -Rhat Ke pinning the gain;
// no definiteness constraint on Pbarhat.
SdpModel lmi_bound_given_gain(const net::ErrorSystem& es, const MatrixXd& ke,
                              SymVar* phat_var, SymVar* pbarhat_var,
                              int* eta_var);

}  // namespace subopt::sdp
