#include "subopt/sdp.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace subopt::sdp {

const VectorXd SdpModel::objective() const {
  VectorXd c = VectorXd::Zero(num_vars());
  for (const auto& [k, v] : objective_) c(k) += v;
  return c;
}

int SdpModel::add_var(const std::string& name) {
  var_names_.push_back(name);
  return num_vars() - 1;
}

SymVar SdpModel::add_sym_var(const std::string& name, int dim) {
  SymVar v;
  v.name = name;
  v.dim = dim;
  v.offset = num_vars();
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i <= j; ++i) {
      var_names_.push_back(name + "(" + std::to_string(i + 1) + "," +
                           std::to_string(j + 1) + ")");
    }
  }
  return v;
}

LmiBlock& SdpModel::add_block(const std::string& name, int dim) {
  LmiBlock b;
  b.name = name;
  b.dim = dim;
  b.f0 = MatrixXd::Zero(dim, dim);
  blocks_.push_back(std::move(b));
  return blocks_.back();
}

void SdpModel::add_equality(const VectorXd& lhs, double rhs) {
  if (lhs.size() != num_vars()) {
    throw std::invalid_argument("SdpModel::add_equality: wrong arity");
  }
  eq_lhs_.push_back(lhs);
  eq_rhs_.push_back(rhs);
}

void SdpModel::set_objective_term(int var, double coeff) {
  objective_.emplace_back(var, coeff);
}

MatrixXd SdpModel::sym_value(const SymVar& v, const VectorXd& y) const {
  return structure::unvec_sym(y.segment(v.offset, structure::sym_dim(v.dim)),
                              v.dim);
}

MatrixXd SdpModel::block_value(const LmiBlock& b, const VectorXd& y) const {
  MatrixXd g = b.f0;
  for (size_t k = 0; k < b.vars.size(); ++k) g += y(b.vars[k]) * b.coeff[k];
  return g;
}

void SdpModel::finalize() {
  if (delta_ >= 0.0) return;
  double mag = 0.0;
  for (const auto& b : blocks_) {
    mag = std::max(mag, b.f0.cwiseAbs().maxCoeff());
    for (const auto& c : b.coeff) mag = std::max(mag, c.cwiseAbs().maxCoeff());
  }
  delta_ = 1e-6 * (1.0 + mag);
}

std::string SdpModel::dump() const {
  std::ostringstream os;
  os << "sdp model: " << num_vars() << " vars, " << blocks_.size()
     << " blocks, " << eq_lhs_.size() << " equalities, delta=" << delta_
     << "\n";
  VectorXd c = objective();
  os << "objective:";
  for (int k = 0; k < num_vars(); ++k) {
    if (c(k) != 0.0) os << " " << c(k) << "*" << var_names_[k];
  }
  os << "\n";
  for (const auto& b : blocks_) {
    os << "block " << b.name << " (dim " << b.dim << "), terms:";
    for (int v : b.vars) os << " " << var_names_[v];
    os << "\n";
  }
  for (size_t e = 0; e < eq_lhs_.size(); ++e) {
    os << "eq " << e << ":";
    for (int k = 0; k < num_vars(); ++k) {
      if (eq_lhs_[e](k) != 0.0)
        os << " " << eq_lhs_[e](k) << "*" << var_names_[k];
    }
    os << " = " << eq_rhs_[e] << "\n";
  }
  return os.str();
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal:
      return "optimal";
    case SdpStatus::infeasible:
      return "infeasible";
    case SdpStatus::numerical_failure:
      return "numerical-failure";
  }
  return "unknown";
}

}  // namespace subopt::sdp
