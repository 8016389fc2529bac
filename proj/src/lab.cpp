#include "qxfer/lab.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "qxfer/error.hpp"
#include "qxfer/rng.hpp"

namespace qxfer {

namespace {

const struct {
  Param p;
  const char* name;
} kParamNames[] = {
    {Param::tmax_rel_e, "tmax_rel_e"},
    {Param::tmax_rel_r, "tmax_rel_r"},
    {Param::tmax_rel_both, "tmax_rel_both"},
    {Param::tmax_rel_anti, "tmax_rel_anti"},
    {Param::tau_rel_e, "tau_rel_e"},
    {Param::tau_rel_r, "tau_rel_r"},
    {Param::tau_rel_both, "tau_rel_both"},
    {Param::tm_shift_e_ns, "tm_shift_e_ns"},
    {Param::tm_shift_r_ns, "tm_shift_r_ns"},
    {Param::tm_shift_both_ns, "tm_shift_both_ns"},
    {Param::warp_e, "warp_e"},
    {Param::warp_r, "warp_r"},
    {Param::warp_both, "warp_both"},
    {Param::warp_anti, "warp_anti"},
    {Param::sigma_ns, "sigma_ns"},
    {Param::noise_amp, "noise_amp"},
    {Param::detuning_e_rad_ns, "detuning_e_rad_ns"},
    {Param::td_over_tau, "td_over_tau"},
    {Param::phi_rad, "phi_rad"},
    {Param::tmax_abs, "tmax_abs"},
    {Param::compensation, "compensation"},
    {Param::eta_tl, "eta_tl"},
    {Param::T1_ns, "T1_ns"},
};

struct PointSetup {
  ProtocolParams params;
  DeformationSpec deform;
  double eta_tl, T1_e, T1_r, dt_int;
  double detuning_e = 0.0;
  std::optional<CouplerParams> coupler;
  double comp = 1.0;
  std::optional<DelayConfig> delay;
};

PointSetup make_point(const SweepSpec& spec, const std::vector<double>& x) {
  PointSetup pt;
  pt.params = spec.design;
  pt.deform = spec.base_deform;
  pt.eta_tl = spec.eta_tl;
  pt.T1_e = spec.T1_e;
  pt.T1_r = spec.T1_r;
  pt.dt_int = spec.dt_int;
  pt.coupler = spec.coupler;
  pt.comp = spec.compensation;
  pt.delay = spec.delay;

  // protocol re-designs first so relative overrides refer to the new design
  for (std::size_t i = 0; i < spec.axes.size(); ++i)
    if (spec.axes[i].param == Param::tmax_abs) {
      auto unit = [](Cx v) { return std::abs(v) > 0.0 ? v / std::abs(v) : Cx(1.0, 0.0); };
      pt.params = design_protocol(x[i] * unit(pt.params.t_max_e), x[i] * unit(pt.params.t_max_r),
                                  pt.params.tau_rt_e, pt.params.eta_design);
    }

  for (std::size_t i = 0; i < spec.axes.size(); ++i) {
    const double v = x[i];
    ProtocolParams& p = pt.params;
    DeformationSpec& d = pt.deform;
    switch (spec.axes[i].param) {
      case Param::tmax_rel_e: d.t_max_e_a = p.t_max_e * (1.0 + v); break;
      case Param::tmax_rel_r: d.t_max_r_a = p.t_max_r * (1.0 + v); break;
      case Param::tmax_rel_both:
        d.t_max_e_a = p.t_max_e * (1.0 + v);
        d.t_max_r_a = p.t_max_r * (1.0 + v);
        break;
      case Param::tmax_rel_anti:
        d.t_max_e_a = p.t_max_e * (1.0 + v);
        d.t_max_r_a = p.t_max_r * (1.0 - v);
        break;
      case Param::tau_rel_e: d.tau_e_a = p.tau_e * (1.0 + v); break;
      case Param::tau_rel_r: d.tau_r_a = p.tau_r * (1.0 + v); break;
      case Param::tau_rel_both:
        d.tau_e_a = p.tau_e * (1.0 + v);
        d.tau_r_a = p.tau_r * (1.0 + v);
        break;
      case Param::tm_shift_e_ns: d.t_m_e_a = p.t_m_e + v; break;
      case Param::tm_shift_r_ns: d.t_m_r_a = p.t_m_r + v; break;
      case Param::tm_shift_both_ns:
        d.t_m_e_a = p.t_m_e + v;
        d.t_m_r_a = p.t_m_r + v;
        break;
      case Param::warp_e: d.alpha_e = v; break;
      case Param::warp_r: d.alpha_r = v; break;
      case Param::warp_both: d.alpha_e = d.alpha_r = v; break;
      case Param::warp_anti:
        d.alpha_e = v;
        d.alpha_r = -v;
        break;
      case Param::sigma_ns: d.sigma = v; break;
      case Param::noise_amp:
        if (d.noise == NoiseKind::none)
          throw ConfigError("noise_amp axis needs a noise kind in the base deformation");
        d.noise_amp = v;
        break;
      case Param::detuning_e_rad_ns: pt.detuning_e = v; break;
      case Param::td_over_tau: {
        if (!pt.delay) pt.delay = DelayConfig{};
        pt.delay->t_d = v * std::min(p.tau_e, p.tau_r);
        break;
      }
      case Param::phi_rad: {
        if (!pt.delay) pt.delay = DelayConfig{};
        pt.delay->phi = v;
        break;
      }
      case Param::tmax_abs: break;  // handled above
      case Param::compensation: pt.comp = v; break;
      case Param::eta_tl: pt.eta_tl = v; break;
      case Param::T1_ns: pt.T1_e = pt.T1_r = v; break;
    }
  }
  return pt;
}

bool is_noisy(const PointSetup& pt) {
  return pt.deform.noise != NoiseKind::none && pt.deform.noise_amp > 0.0;
}

SweepRow run_point(const SweepSpec& spec, const PointSetup& pt, const std::vector<double>& x,
                   int realization, std::uint64_t point_idx) {
  SweepRow row;
  row.x = x;
  row.realization = realization;

  SimConfig cfg;
  cfg.design = pt.params;
  cfg.eta_tl = pt.eta_tl;
  cfg.T1_e = pt.T1_e;
  cfg.T1_r = pt.T1_r;
  cfg.dt_int = pt.dt_int;
  cfg.record_trajectory = false;

  TransferOutcome out;
  if (pt.delay) {
    if (!is_identity(pt.deform)) {
      DeformationSpec d = pt.deform;
      d.seed = mix_seed(spec.master_seed, point_idx, std::uint64_t(realization));
      cfg.shapes = apply_deformations(pt.params, d);
    }
    out = simulate_with_delay(cfg, *pt.delay).second;
  } else if (pt.coupler) {
    if (!is_identity(pt.deform))
      throw ConfigError("coupler-model sweeps support only undeformed pulses");
    CoupledSchedules cs = apply_coupler(pt.params, *pt.coupler, pt.comp);
    cfg.shapes = std::move(cs.shapes);
    cfg.delta_omega_e = std::move(cs.dw_e);
    cfg.delta_omega_r = std::move(cs.dw_r);
    cfg.delta_omega_e_const = pt.detuning_e;
    out = simulate(cfg).second;
  } else {
    if (!is_identity(pt.deform)) {
      DeformationSpec d = pt.deform;
      d.seed = mix_seed(spec.master_seed, point_idx, std::uint64_t(realization));
      cfg.shapes = apply_deformations(pt.params, d);
    }
    cfg.delta_omega_e_const = pt.detuning_e;
    out = simulate(cfg).second;
  }
  row.eta = out.eta;
  row.phi_f = out.phi_f;
  return row;
}

}  // namespace

Param param_from_string(const std::string& name) {
  for (const auto& e : kParamNames)
    if (name == e.name) return e.p;
  throw ConfigError("unknown sweep parameter '" + name + "'");
}

std::string param_to_string(Param p) {
  for (const auto& e : kParamNames)
    if (p == e.p) return e.name;
  return "?";
}

SweepTable run_sweep(const SweepSpec& spec) {
  if (spec.axes.empty()) throw ConfigError("sweep needs at least one axis");
  for (const Axis& a : spec.axes)
    if (a.values.size() < 2) throw ConfigError("each sweep axis needs at least 2 values");
  if (spec.realizations < 1) throw ConfigError("realization count must be >= 1");

  // cartesian grid, last axis fastest
  std::size_t n_points = 1;
  for (const Axis& a : spec.axes) n_points *= a.values.size();

  struct Task {
    std::vector<double> x;
    PointSetup pt;
    std::uint64_t point_idx = 0;
    int realization = 0;
    std::size_t row = 0;
    std::string setup_error;
  };
  std::vector<Task> tasks;
  std::size_t n_rows = 0;
  for (std::size_t ip = 0; ip < n_points; ++ip) {
    std::vector<double> x(spec.axes.size());
    std::size_t rest = ip;
    for (std::size_t ax = spec.axes.size(); ax-- > 0;) {
      const auto& vals = spec.axes[ax].values;
      x[ax] = vals[rest % vals.size()];
      rest /= vals.size();
    }
    try {
      PointSetup pt = make_point(spec, x);
      const int reps = is_noisy(pt) ? spec.realizations : 1;
      for (int r = 0; r < reps; ++r)
        tasks.push_back({x, pt, std::uint64_t(ip), r, n_rows++});
    } catch (const std::exception& e) {
      Task t;
      t.x = x;
      t.point_idx = std::uint64_t(ip);
      t.realization = 0;
      t.row = n_rows++;
      t.setup_error = e.what();
      tasks.push_back(std::move(t));
    }
  }

  SweepTable table;
  for (const Axis& a : spec.axes) table.axis_names.push_back(param_to_string(a.param));
  table.rows.resize(n_rows);

  auto work = [&](std::size_t i) {
    const Task& t = tasks[i];
    try {
      if (!t.setup_error.empty()) throw ConfigError(t.setup_error);
      table.rows[t.row] = run_point(spec, t.pt, t.x, t.realization, t.point_idx);
    } catch (const std::exception& e) {
      SweepRow row;
      row.x = t.x;
      row.realization = t.realization;
      row.eta = row.phi_f = std::numeric_limits<double>::quiet_NaN();
      row.error = e.what();
      table.rows[t.row] = row;
    }
  };

  const int nthreads = std::max(1, spec.threads);
  if (nthreads == 1 || tasks.size() < 2) {
    for (std::size_t i = 0; i < tasks.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) work(i);
      });
    for (std::thread& th : pool) th.join();
  }
  return table;
}

FitResult fit_quadratic(const SweepTable& table, double baseline_eta) {
  const std::size_t n_axes = table.axis_names.size();
  if (n_axes < 1 || n_axes > 2)
    throw ConfigError("quadratic fit supports 1 or 2 axes");
  std::vector<const SweepRow*> rows;
  for (const SweepRow& r : table.rows)
    if (r.error.empty()) rows.push_back(&r);
  const std::size_t k = n_axes == 1 ? 1 : 3;
  if (rows.size() < std::max<std::size_t>(k + 1, 6))
    throw ConfigError("quadratic fit needs at least 6 usable points");

  Eigen::MatrixXd X(long(rows.size()), long(k));
  Eigen::VectorXd y(long(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = *rows[i];
    if (n_axes == 1) {
      X(long(i), 0) = r.x[0] * r.x[0];
    } else {
      X(long(i), 0) = r.x[0] * r.x[0];
      X(long(i), 1) = r.x[1] * r.x[1];
      X(long(i), 2) = r.x[0] * r.x[1];
    }
    y(long(i)) = baseline_eta - r.eta;  // -delta_eta
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < long(k)) throw ConfigError("rank-deficient design matrix in quadratic fit");
  Eigen::VectorXd c = qr.solve(y);
  const Eigen::VectorXd resid = y - X * c;

  FitResult fit;
  fit.model = n_axes == 1 ? "c1*x^2" : "c1*x^2 + c2*y^2 + c3*x*y";
  fit.residual_norm = resid.norm();
  const double dof = double(rows.size()) - double(k);
  const double s2 = dof > 0.0 ? resid.squaredNorm() / dof : 0.0;
  const Eigen::MatrixXd cov = s2 * (X.transpose() * X).inverse();
  for (std::size_t j = 0; j < k; ++j) {
    fit.coeff.push_back(c(long(j)));
    fit.stderr_.push_back(std::sqrt(std::max(0.0, cov(long(j), long(j)))));
  }
  return fit;
}

double noise_oracle(const ProtocolParams& params, NoiseKind kind, double amp, double xi_var,
                    double dt_int) {
  if (amp < 0.0 || xi_var < 0.0) throw ConfigError("noise amplitude and variance must be >= 0");
  SimConfig cfg;
  cfg.design = params;
  cfg.dt_int = dt_int;
  cfg.record_trajectory = false;
  const double boost = amp * amp * xi_var;
  if (kind == NoiseKind::multiplicative) {
    cfg.leak_scale_e = cfg.leak_scale_r = 1.0 + boost;
  } else if (kind == NoiseKind::additive) {
    cfg.leak_offset_e = boost / params.tau_e;
    cfg.leak_offset_r = boost / params.tau_r;
  }
  return simulate(cfg).second.eta;
}

}  // namespace qxfer
