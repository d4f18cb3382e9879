#include "cli/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subopt/errors.hpp"
#include "subopt/graph.hpp"
#include "subopt/linalg.hpp"
#include "subopt/network.hpp"
#include "subopt/sim.hpp"
#include "subopt/synth.hpp"

namespace subopt::cli {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;
using nlohmann::ordered_json;

// ---- deterministic report serialization --------------------------------

std::string g17(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void dump_g17(const ordered_json& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<size_t>(depth), ' ');
  const std::string pad_in(2 * static_cast<size_t>(depth + 1), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      size_t k = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++k) {
        out += pad_in;
        out += ordered_json(it.key()).dump();
        out += ": ";
        dump_g17(it.value(), out, depth + 1);
        if (k + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const auto& e : j) {
        if (e.is_structured()) flat = false;
      }
      if (flat) {
        out += "[";
        for (size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          dump_g17(j[k], out, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (size_t k = 0; k < j.size(); ++k) {
        out += pad_in;
        dump_g17(j[k], out, depth + 1);
        if (k + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += g17(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

std::string render_report(const ordered_json& j) {
  std::string out;
  dump_g17(j, out, 0);
  out += "\n";
  return out;
}

ordered_json mat_json(const MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vec_json(const VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered_json spectrum_json(const linalg::Spectrum& s) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    a.push_back(ordered_json::array(
        {s.eigenvalues(i).real(), s.eigenvalues(i).imag()}));
  }
  return ordered_json{{"eigenvalues", std::move(a)}, {"max_real", s.max_real}};
}

ordered_json cert_json(const synth::Certificates& c) {
  ordered_json bm = ordered_json::array();
  for (double v : c.block_min_eig) bm.push_back(v);
  ordered_json er = ordered_json::array();
  for (double v : c.eq_residual) er.push_back(v);
  return ordered_json{{"delta", c.delta},
                      {"block_min_eig", std::move(bm)},
                      {"eq_residual", std::move(er)}};
}

// ---- config parsing ------------------------------------------------------

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw std::invalid_argument("config field '" + field + "': " + why);
}

const json& require(const json& cfg, const std::string& field) {
  auto it = cfg.find(field);
  if (it == cfg.end()) bad_field(field, "missing");
  return *it;
}

double number_field(const json& j, const std::string& field) {
  if (!j.is_number()) bad_field(field, "expected a number");
  return j.get<double>();
}

MatrixXd parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    bad_field(field, "expected a matrix as an array of rows");
  }
  const size_t cols = j.front().size();
  if (cols == 0) bad_field(field, "rows must not be empty");
  MatrixXd m(j.size(), cols);
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      bad_field(field, "row " + std::to_string(i + 1) +
                           " has inconsistent length");
    }
    for (size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) bad_field(field, "entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          j[i][c].get<double>();
    }
  }
  return m;
}

bool looks_like_matrix_list(const json& j) {
  return j.is_array() && !j.empty() && j.front().is_array() &&
         !j.front().empty() && j.front().front().is_array();
}

std::vector<MatrixXd> parse_matrix_list(const json& j,
                                        const std::string& field) {
  std::vector<MatrixXd> out;
  if (looks_like_matrix_list(j)) {
    for (size_t i = 0; i < j.size(); ++i) {
      out.push_back(parse_matrix(j[i], field + "[" + std::to_string(i + 1) +
                                            "]"));
    }
  } else {
    out.push_back(parse_matrix(j, field));
  }
  return out;
}

VectorXd parse_stacked_vector(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) bad_field(field, "expected an array");
  std::vector<double> vals;
  if (j.front().is_array()) {
    for (size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_array()) bad_field(field, "mixed nesting");
      for (const auto& e : j[i]) {
        if (!e.is_number()) bad_field(field, "entries must be numbers");
        vals.push_back(e.get<double>());
      }
    }
  } else {
    for (const auto& e : j) {
      if (!e.is_number()) bad_field(field, "entries must be numbers");
      vals.push_back(e.get<double>());
    }
  }
  return Eigen::Map<VectorXd>(vals.data(),
                              static_cast<Eigen::Index>(vals.size()));
}

std::vector<std::pair<int, int>> parse_edges(const json& j) {
  if (!j.is_array()) bad_field("edges", "expected an array of [i, j] pairs");
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer()) {
      bad_field("edges", "each edge must be a pair of integer agent ids");
    }
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return edges;
}

struct Options {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  bool csv = false;
  double delta = 0.0;
  double horizon = 0.0;
  double dt = 0.0;
};

json load_config(const Options& o) {
  std::ifstream in(o.config_path);
  if (!in) {
    throw std::invalid_argument("cannot read config '" + o.config_path + "'");
  }
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config '" + o.config_path +
                                "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) {
    throw std::invalid_argument("config '" + o.config_path +
                                "' must be a JSON object");
  }
  if (cfg.contains("mode")) {
    const auto& m = cfg["mode"];
    if (!m.is_string()) bad_field("mode", "expected a string");
    const std::string v = m.get<std::string>();
    if (v != "lqr" && v != "synth" && v != "bound" && v != "baseline" &&
        v != "simulate") {
      bad_field("mode", "unknown mode '" + v + "'");
    }
  }
  return cfg;
}

net::MasProblem parse_problem(const json& cfg) {
  MatrixXd a = parse_matrix(require(cfg, "a"), "a");
  std::vector<MatrixXd> b = parse_matrix_list(require(cfg, "b"), "b");
  MatrixXd qu = parse_matrix(require(cfg, "qu"), "qu");
  MatrixXd ru = parse_matrix(require(cfg, "ru"), "ru");
  int n_agents = 0;
  if (cfg.contains("n_agents")) {
    if (!cfg["n_agents"].is_number_integer()) {
      bad_field("n_agents", "expected an integer");
    }
    n_agents = cfg["n_agents"].get<int>();
  } else if (b.size() > 1) {
    n_agents = static_cast<int>(b.size());
  } else {
    bad_field("n_agents", "missing and not implied by a per-agent 'b' list");
  }
  if (b.size() == 1 && n_agents > 1) {
    b.assign(static_cast<size_t>(n_agents), b.front());
  }
  if (static_cast<int>(b.size()) != n_agents) {
    bad_field("b", "expected one input matrix per agent");
  }
  graph::Topology topology(n_agents, parse_edges(require(cfg, "edges")));
  VectorXd x0 = parse_stacked_vector(require(cfg, "x0"), "x0");
  net::MasProblem p{std::move(a),  std::move(b),        std::move(qu),
                    std::move(ru), std::move(topology), std::move(x0)};
  p.validate();
  return p;
}

double resolve(double flag_value, const json& cfg, const std::string& field) {
  if (flag_value > 0.0) return flag_value;
  if (cfg.contains(field)) return number_field(cfg[field], field);
  return 0.0;
}

std::string config_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::string write_report(const Options& o, const ordered_json& report,
                         std::ostream& out) {
  std::filesystem::create_directories(o.out_dir);
  const std::string path = (std::filesystem::path(o.out_dir) /
                            (config_stem(o.config_path) + "_" + o.command +
                             ".json"))
                               .string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write report '" + path + "'");
  f << render_report(report);
  if (!f) throw std::runtime_error("short write on report '" + path + "'");
  out << "report: " << path << "\n";
  return path;
}

// Simulates the closed loop under the stacked gain and attaches the result
// to the report. The Lyapunov tail is included whenever the gain is
// diffusive and stabilizing, so quadrature + tail can be checked against
// the certified cost.
void attach_simulation(const Options& o, const net::MasProblem& p,
                       const MatrixXd& kx, double T, double dt,
                       ordered_json& report, std::ostream& out) {
  const sim::Trajectory traj = sim::simulate(p, kx, T, dt);
  MatrixXd y;
  const MatrixXd* y_ptr = nullptr;
  try {
    const net::ErrorSystem es = net::build_error_system(p);
    const MatrixXd ke = net::ke_from_kx(kx, p.n(), p.m(), p.n_agents());
    const MatrixXd acl = net::closed_loop_error_matrix(es, ke);
    y = linalg::lyap_solve(acl,
                           es.qtil + ke.transpose() * es.rhat * ke);
    y_ptr = &y;
  } catch (const std::exception&) {
    y_ptr = nullptr;
  }
  const sim::SimReport rep = sim::report(p, traj, y_ptr);
  ordered_json s{{"horizon", T},
                 {"dt", dt},
                 {"j_quad", rep.j_quad},
                 {"metric_initial", rep.metric_initial},
                 {"metric_final", rep.metric_final}};
  if (y_ptr) {
    s["tail"] = rep.tail;
    s["j_total"] = rep.j_quad + rep.tail;
  }
  if (o.csv) {
    std::filesystem::create_directories(o.out_dir);
    const std::string csv_path = (std::filesystem::path(o.out_dir) /
                                  (config_stem(o.config_path) + "_" +
                                   o.command + ".csv"))
                                     .string();
    sim::write_csv(traj, p.n(), p.m(), p.n_agents(), csv_path);
    s["csv"] = csv_path;
    out << "trajectory: " << csv_path << "\n";
  }
  report["simulation"] = std::move(s);
}

void require_sim_params(double T, double dt) {
  if (T <= 0.0) {
    throw std::invalid_argument(
        "simulation horizon missing: set --horizon or config 'horizon'");
  }
  if (dt <= 0.0) {
    throw std::invalid_argument(
        "integration step missing: set --dt or config 'dt'");
  }
}

ordered_json consensus_report(const std::string& mode,
                              const synth::ConsensusResult& r) {
  return ordered_json{{"mode", mode},
                      {"gamma", r.gamma},
                      {"jactual", r.jactual},
                      {"eta", r.eta},
                      {"kx", mat_json(r.kx)},
                      {"ke", mat_json(r.ke)},
                      {"phat", mat_json(r.phat)},
                      {"pbarhat", mat_json(r.pbarhat)},
                      {"ptilde_e", mat_json(r.ptilde_e)},
                      {"closed_loop", spectrum_json(r.closed_loop)},
                      {"certificates", cert_json(r.cert)}};
}

int run_lqr(const Options& o, const json& cfg, std::ostream& out) {
  const MatrixXd a = parse_matrix(require(cfg, "a"), "a");
  std::vector<MatrixXd> bs = parse_matrix_list(require(cfg, "b"), "b");
  if (bs.size() != 1) bad_field("b", "lqr expects a single input matrix");
  const MatrixXd qu = parse_matrix(require(cfg, "qu"), "qu");
  const MatrixXd ru = parse_matrix(require(cfg, "ru"), "ru");
  const VectorXd x0 = parse_stacked_vector(require(cfg, "x0"), "x0");
  const double delta = o.delta > 0.0 ? o.delta : resolve(0.0, cfg, "delta");

  const synth::LqrResult r = synth::design_lqr(a, bs.front(), qu, ru, x0,
                                               delta);
  ordered_json report{{"mode", "lqr"},
                      {"jstar", r.jstar},
                      {"bound", r.bound},
                      {"epsilon", r.epsilon},
                      {"jactual", r.jactual},
                      {"eta", r.eta},
                      {"theta", r.theta},
                      {"stable_branch", r.stable_branch},
                      {"k", mat_json(r.k)},
                      {"p", mat_json(r.p)},
                      {"pbar", mat_json(r.pbar)},
                      {"ptilde", mat_json(r.ptilde)},
                      {"closed_loop", spectrum_json(r.closed_loop)},
                      {"certificates", cert_json(r.cert)}};
  out << "lqr: jstar = " << g17(r.jstar) << ", bound = " << g17(r.bound)
      << ", epsilon = " << g17(r.epsilon) << ", j = " << g17(r.jactual)
      << "\n";
  write_report(o, report, out);
  return 0;
}

int run_synth(const Options& o, const json& cfg, std::ostream& out) {
  const net::MasProblem p = parse_problem(cfg);
  const double delta = o.delta > 0.0 ? o.delta : resolve(0.0, cfg, "delta");
  const synth::ConsensusResult r = synth::design_protocol(p, delta);
  ordered_json report = consensus_report("synth", r);
  out << "synth: gamma = " << g17(r.gamma) << ", jhat = " << g17(r.jactual)
      << ", eta = " << g17(r.eta) << "\n";
  const double T = resolve(o.horizon, cfg, "horizon");
  const double dt = resolve(o.dt, cfg, "dt");
  if (o.csv) {
    require_sim_params(T, dt);
    attach_simulation(o, p, r.kx, T, dt, report, out);
  }
  write_report(o, report, out);
  return 0;
}

int run_bound(const Options& o, const json& cfg, std::ostream& out) {
  const net::MasProblem p = parse_problem(cfg);
  const MatrixXd kx = parse_matrix(require(cfg, "gain"), "gain");
  const double delta = o.delta > 0.0 ? o.delta : resolve(0.0, cfg, "delta");
  const synth::ConsensusResult r = synth::certify_protocol(p, kx, delta);
  ordered_json report = consensus_report("bound", r);
  out << "bound: gamma = " << g17(r.gamma) << ", jhat = " << g17(r.jactual)
      << ", eta = " << g17(r.eta) << "\n";
  const double T = resolve(o.horizon, cfg, "horizon");
  const double dt = resolve(o.dt, cfg, "dt");
  if (o.csv) {
    require_sim_params(T, dt);
    attach_simulation(o, p, kx, T, dt, report, out);
  }
  write_report(o, report, out);
  return 0;
}

int run_baseline(const Options& o, const json& cfg, std::ostream& out) {
  const net::MasProblem p = parse_problem(cfg);
  const double delta = o.delta > 0.0 ? o.delta : resolve(0.0, cfg, "delta");
  const synth::BaselineResult b = synth::baseline_protocol(p);
  const synth::ConsensusResult s = synth::design_protocol(p, delta);
  const double radius = b.radius_for(s.gamma);
  ordered_json report{{"mode", "baseline"},
                      {"c", b.c},
                      {"p", b.p},
                      {"kx", mat_json(b.kx)},
                      {"jactual", b.jactual},
                      {"x0_norm", b.x0_norm},
                      {"synth_gamma", s.gamma},
                      {"radius", radius}};
  out << "baseline: c = " << g17(b.c) << ", p = " << g17(b.p)
      << ", jhat = " << g17(b.jactual) << "\n";
  out << "baseline: cost stays below gamma = " << g17(s.gamma)
      << " only for initial errors inside radius " << g17(radius)
      << " (here ||e0|| = " << g17(b.x0_norm) << ")\n";
  const double T = resolve(o.horizon, cfg, "horizon");
  const double dt = resolve(o.dt, cfg, "dt");
  if (o.csv) {
    require_sim_params(T, dt);
    attach_simulation(o, p, b.kx, T, dt, report, out);
  }
  write_report(o, report, out);
  return 0;
}

int run_simulate(const Options& o, const json& cfg, std::ostream& out) {
  const net::MasProblem p = parse_problem(cfg);
  const MatrixXd kx = parse_matrix(require(cfg, "gain"), "gain");
  const double T = resolve(o.horizon, cfg, "horizon");
  const double dt = resolve(o.dt, cfg, "dt");
  require_sim_params(T, dt);
  ordered_json report{{"mode", "simulate"}};
  Options forced = o;
  forced.csv = true;
  attach_simulation(forced, p, kx, T, dt, report, out);
  const auto& s = report["simulation"];
  out << "simulate: j_quad = " << g17(s["j_quad"].get<double>())
      << ", metric(T) = " << g17(s["metric_final"].get<double>()) << "\n";
  write_report(o, report, out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"suboptimal feedback and consensus protocol toolkit",
               "suboptctl"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"lqr", "single-agent feedback with a certified cost bound"},
      {"synth", "diffusive consensus protocol synthesis"},
      {"bound", "cost bound for a given stacked gain"},
      {"baseline", "scalar-integrator comparison design"},
      {"simulate", "closed-loop integration of a given gain"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config_path, "problem description (JSON)")
        ->required();
    sub->add_option("--out", o.out_dir, "output directory for reports");
    sub->add_flag("--csv", o.csv, "also write the trajectory CSV");
    sub->add_option("--delta", o.delta,
                    "strictness margin for the matrix inequalities");
    sub->add_option("--horizon", o.horizon, "simulation horizon");
    sub->add_option("--dt", o.dt, "integration step");
    sub->callback([&o, name = name] { o.command = name; });
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    const json cfg = load_config(o);
    if (o.command == "lqr") return run_lqr(o, cfg, out);
    if (o.command == "synth") return run_synth(o, cfg, out);
    if (o.command == "bound") return run_bound(o, cfg, out);
    if (o.command == "baseline") return run_baseline(o, cfg, out);
    return run_simulate(o, cfg, out);
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace subopt::cli
