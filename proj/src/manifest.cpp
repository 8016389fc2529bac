#include "qxfer/manifest.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <vector>

#include "qxfer/io.hpp"

namespace qxfer {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config error at " + where + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

double num(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) fail(where + "/" + key, "expected a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) fail(key, "expected a number");
  return it->get<double>();
}

Cx complex_field(const json& v, const std::string& where) {
  if (v.is_number()) return Cx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Cx(v[0].get<double>(), v[1].get<double>());
  fail(where, "expected a number or [re, im] pair");
}

ProtocolParams parse_protocol(const json& j) {
  if (!j.is_object()) fail("protocol", "expected an object");
  const double freq = num(j, "freq_GHz", "protocol");
  const double eta_d = num(j, "eta_design", "protocol");
  Cx te, tr;
  if (j.contains("abs_t_max")) {
    te = tr = Cx(num(j, "abs_t_max", "protocol"), 0.0);
  } else {
    te = complex_field(require(j, "t_max_e", "protocol"), "protocol/t_max_e");
    tr = complex_field(require(j, "t_max_r", "protocol"), "protocol/t_max_r");
  }
  return design_protocol(te, tr, round_trip_time_ns(freq), eta_d);
}

DeformationSpec parse_deformation(const json& j, const ProtocolParams& p) {
  DeformationSpec d;
  if (j.is_null()) return d;
  if (!j.is_object()) fail("deformation", "expected an object");
  if (j.contains("t_max_rel_e")) d.t_max_e_a = p.t_max_e * (1.0 + num(j, "t_max_rel_e", "deformation"));
  if (j.contains("t_max_rel_r")) d.t_max_r_a = p.t_max_r * (1.0 + num(j, "t_max_rel_r", "deformation"));
  if (j.contains("tau_rel_e")) d.tau_e_a = p.tau_e * (1.0 + num(j, "tau_rel_e", "deformation"));
  if (j.contains("tau_rel_r")) d.tau_r_a = p.tau_r * (1.0 + num(j, "tau_rel_r", "deformation"));
  if (j.contains("t_m_shift_e_ns")) d.t_m_e_a = p.t_m_e + num(j, "t_m_shift_e_ns", "deformation");
  if (j.contains("t_m_shift_r_ns")) d.t_m_r_a = p.t_m_r + num(j, "t_m_shift_r_ns", "deformation");
  d.alpha_e = num_or(j, "alpha_e", 0.0);
  d.alpha_r = num_or(j, "alpha_r", 0.0);
  d.sigma = num_or(j, "sigma_ns", 0.0);
  if (j.contains("noise")) {
    const json& n = j["noise"];
    if (!n.is_object()) fail("deformation/noise", "expected an object");
    const std::string kind = require(n, "kind", "deformation/noise").get<std::string>();
    if (kind == "multiplicative")
      d.noise = NoiseKind::multiplicative;
    else if (kind == "additive")
      d.noise = NoiseKind::additive;
    else if (kind != "none")
      fail("deformation/noise/kind", "must be none, multiplicative or additive");
    d.noise_amp = num_or(n, "amp", 0.0);
    d.noise_dt = num_or(n, "dt_ns", 1.0);
    d.seed = n.contains("seed") ? n["seed"].get<std::uint64_t>() : 0;
  }
  return d;
}

CouplerParams parse_coupler(const json& j) {
  if (!j.is_object()) fail("coupler", "expected an object");
  CouplerParams c;
  c.R_res = num_or(j, "R_res_ohm", 80.0);
  c.R_tl = num_or(j, "R_tl_ohm", 50.0);
  const double freq = num(j, "freq_GHz", "coupler");
  c.omega0 = 2.0 * 3.14159265358979323846 * freq;  // rad/ns
  c.L1g = num_or(j, "L1g_pH", 480.0);
  c.L2g = num_or(j, "L2g_pH", 480.0);
  c.Mg = num_or(j, "Mg_pH", 140.0);
  if (j.contains("Le_pH"))
    c.Le = num(j, "Le_pH", "coupler");
  else if (j.contains("d_over_lambda"))
    c.Le = effective_inductance(c.R_res, c.omega0, num(j, "d_over_lambda", "coupler"));
  else
    fail("coupler", "needs Le_pH or d_over_lambda");
  if (j.contains("Ic1_uA")) c.Ic1 = num(j, "Ic1_uA", "coupler");
  if (j.contains("Ic2_uA")) c.Ic2 = num(j, "Ic2_uA", "coupler");
  return c;
}

std::vector<double> parse_values(const json& a, const std::string& where) {
  std::vector<double> out;
  if (a.is_array()) {
    for (const json& v : a) {
      if (!v.is_number()) fail(where, "axis values must be numbers");
      out.push_back(v.get<double>());
    }
  } else if (a.is_object()) {
    const double from = num(a, "from", where), to = num(a, "to", where);
    const long count = long(num(a, "count", where));
    if (count < 2) fail(where, "grid needs count >= 2");
    const bool logspace = a.value("log", false);
    for (long i = 0; i < count; ++i) {
      const double s = double(i) / double(count - 1);
      out.push_back(logspace ? from * std::pow(to / from, s) : from + (to - from) * s);
    }
  } else {
    fail(where, "expected an array of values or a {from,to,count} grid");
  }
  return out;
}

void apply_loss(const json& root, SimConfig& cfg) {
  if (!root.contains("loss")) return;
  const json& l = root["loss"];
  if (!l.is_object()) fail("loss", "expected an object");
  cfg.eta_tl = num_or(l, "eta_tl", 1.0);
  cfg.T1_e = num_or(l, "T1_e_ns", std::numeric_limits<double>::infinity());
  cfg.T1_r = num_or(l, "T1_r_ns", std::numeric_limits<double>::infinity());
}

void run_simulate(const json& root, const CliOptions& opt) {
  ProtocolParams params = parse_protocol(require(root, "protocol", "$"));
  DeformationSpec deform = parse_deformation(root.value("deformation", json()), params);
  if (opt.seed) deform.seed = *opt.seed;

  SimConfig cfg;
  cfg.design = params;
  cfg.dt_int = num_or(root, "dt_int_ns", 0.0);
  apply_loss(root, cfg);
  if (root.contains("detuning")) {
    const json& d = root["detuning"];
    if (!d.is_object()) fail("detuning", "expected an object");
    cfg.delta_omega_e_const = num_or(d, "delta_omega_e_rad_ns", 0.0);
    cfg.delta_omega_r_const = num_or(d, "delta_omega_r_rad_ns", 0.0);
  }

  bool have_shapes = false;
  if (root.contains("coupler")) {
    if (!is_identity(deform))
      fail("coupler", "coupler model cannot be combined with pulse deformations");
    const json& cj = root["coupler"];
    CoupledSchedules cs =
        apply_coupler(params, parse_coupler(cj), num_or(cj, "compensation", 1.0));
    cfg.shapes = std::move(cs.shapes);
    cfg.delta_omega_e = std::move(cs.dw_e);
    cfg.delta_omega_r = std::move(cs.dw_r);
    have_shapes = true;
  } else if (!is_identity(deform)) {
    cfg.shapes = apply_deformations(params, deform);
    have_shapes = true;
  }

  FieldTrajectory traj;
  TransferOutcome outcome;
  if (root.contains("delay")) {
    const json& d = root["delay"];
    DelayConfig delay{num(d, "t_d_ns", "delay"), num_or(d, "phi_rad", 0.0)};
    std::tie(traj, outcome) = simulate_with_delay(cfg, delay);
  } else {
    std::tie(traj, outcome) = simulate(cfg);
  }

  const std::string traj_str = trajectory_csv(traj);
  const std::string out_str = outcome_json(outcome);
  const std::string shapes_str = have_shapes ? shapes_csv(*cfg.shapes) : std::string();
  write_file(opt.out_prefix + "_trajectory.csv", traj_str);
  write_file(opt.out_prefix + "_outcome.json", out_str);
  if (have_shapes) write_file(opt.out_prefix + "_shapes.csv", shapes_str);
}

void run_sweep_cmd(const json& root, const CliOptions& opt) {
  SweepSpec spec;
  spec.design = parse_protocol(require(root, "protocol", "$"));
  spec.base_deform = parse_deformation(root.value("deformation", json()), spec.design);
  spec.dt_int = num_or(root, "dt_int_ns", 0.0);
  {
    SimConfig tmp;
    apply_loss(root, tmp);
    spec.eta_tl = tmp.eta_tl;
    spec.T1_e = tmp.T1_e;
    spec.T1_r = tmp.T1_r;
  }
  if (root.contains("coupler")) {
    const json& cj = root["coupler"];
    spec.coupler = parse_coupler(cj);
    spec.compensation = num_or(cj, "compensation", 1.0);
  }
  if (root.contains("delay")) {
    const json& d = root["delay"];
    spec.delay = DelayConfig{num_or(d, "t_d_ns", 0.0), num_or(d, "phi_rad", 0.0)};
  }
  const json& axes = require(root, "axes", "$");
  if (!axes.is_array() || axes.empty()) fail("axes", "expected a non-empty array");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const std::string where = "axes[" + std::to_string(i) + "]";
    const json& a = axes[i];
    if (!a.is_object()) fail(where, "expected an object");
    Axis axis;
    axis.param = param_from_string(require(a, "param", where).get<std::string>());
    axis.values = parse_values(require(a, "values", where), where + "/values");
    spec.axes.push_back(std::move(axis));
  }
  spec.realizations = int(num_or(root, "realizations", 1.0));
  spec.master_seed = root.contains("master_seed") ? root["master_seed"].get<std::uint64_t>() : 0;
  if (opt.seed) spec.master_seed = *opt.seed;
  spec.threads = opt.threads;

  SweepTable table = run_sweep(spec);
  write_file(opt.out_prefix + "_sweep.csv", sweep_csv(table));
}

void run_coupler_cmd(const json& root, const CliOptions& opt) {
  CouplerParams params = parse_coupler(require(root, "coupler", "$"));
  std::vector<double> Ms;
  if (root.contains("M_grid_pH")) {
    Ms = parse_values(root["M_grid_pH"], "M_grid_pH");
  } else if (root.contains("abs_t_targets")) {
    for (double t : parse_values(root["abs_t_targets"], "abs_t_targets"))
      Ms.push_back(invert_M(params, t));
  } else {
    fail("$", "coupler command needs M_grid_pH or abs_t_targets");
  }
  std::vector<CouplerPoint> points;
  points.reserve(Ms.size());
  for (double M : Ms) points.push_back(amplitudes(params, M));
  write_file(opt.out_prefix + "_coupler.csv", coupler_csv(points));
}

}  // namespace

void run_manifest(const CliOptions& opt) {
  std::ifstream f(opt.config_path);
  if (!f) throw ConfigError("cannot read config file '" + opt.config_path + "'");
  json root;
  try {
    root = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse failure in '" + opt.config_path + "': " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  const int version = int(num_or(root, "schema_version", 1.0));
  if (version != 1) throw ConfigError("unrecognized schema_version " + std::to_string(version));
  try {
    const std::string cmd = require(root, "command", "$").get<std::string>();
    if (cmd == "simulate")
      run_simulate(root, opt);
    else if (cmd == "sweep")
      run_sweep_cmd(root, opt);
    else if (cmd == "coupler")
      run_coupler_cmd(root, opt);
    else
      fail("command", "must be simulate, sweep or coupler");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
}

}  // namespace qxfer
