#include "qxfer/coupler.hpp"

#include <cmath>
#include <string>

#include "qxfer/error.hpp"

namespace qxfer {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPhi0Over2Pi = 329.106;  // pH * uA

void validate(const CouplerParams& p) {
  if (!(p.R_res > 0.0) || !(p.R_tl > 0.0) || !(p.omega0 > 0.0) || !(p.L1g > 0.0) ||
      !(p.L2g > 0.0) || !(p.Mg > 0.0) || !(p.Le > 0.0))
    throw ConfigError("coupler parameters must be positive");
  if (!(p.omega0 * p.Le * 1e-3 < p.R_res))
    throw ConfigError("tap inductance too large: omega*Le/R_res must be < 1");
}

// scattering amplitudes in the e^{+i w t} frame; inductances in nH so that
// omega[rad/ns] * L[nH] is in Ohm
struct PlusFrame {
  Cx b, r_in, t;
};

PlusFrame plus_frame(const CouplerParams& p, double M_pH) {
  const double w = p.omega0;
  const double L1 = (p.L1g + p.Mg + M_pH) * 1e-3;
  const double L2 = (p.L2g + p.Mg + M_pH) * 1e-3;
  const double Le = p.Le * 1e-3;
  const double M = M_pH * 1e-3;
  if (!(L1 > 0.0)) throw ConfigError("total primary inductance L1 must stay positive");

  const Cx i(0.0, 1.0);
  const Cx z2 = 1.0 + i * w * L2 / p.R_tl;
  const Cx num = i * w * L1 / p.R_res + w * w * M * M / (p.R_res * p.R_tl * z2);
  const Cx den = 1.0 + L1 / Le - i * w * M * M / (p.R_tl * Le * z2);
  PlusFrame f;
  f.b = num / den;
  const Cx one_plus_b = 1.0 + f.b;
  if (std::abs(one_plus_b) < 1e-12) throw ConfigError("singular coupler configuration: 1 + b = 0");
  f.r_in = -(1.0 - f.b) / one_plus_b;
  const Cx t_in = i * (2.0 * w * M / one_plus_b) * (1.0 / p.R_res + i * f.b / (w * Le)) / z2;
  f.t = std::sqrt(p.R_res / p.R_tl) * t_in;
  return f;
}

}  // namespace

double effective_inductance(double R_res, double omega, double d_over_lambda) {
  if (!(R_res > 0.0) || !(omega > 0.0)) throw ConfigError("impedance and frequency must be positive");
  if (!(d_over_lambda > 0.0) || d_over_lambda >= 0.25)
    throw ConfigError("tap position d/lambda must lie in (0, 0.25)");
  return R_res / omega * std::tan(2.0 * kPi * d_over_lambda) * 1e3;  // pH
}

double flux_to_LJ(double Ic1_uA, double Ic2_uA, double phi_ext_over_phi0) {
  if (!(Ic1_uA > 0.0) || !(Ic2_uA > 0.0)) throw ConfigError("critical currents must be positive");
  const double c = std::cos(2.0 * kPi * phi_ext_over_phi0);
  const double s2 = Ic1_uA * Ic1_uA + Ic2_uA * Ic2_uA + 2.0 * Ic1_uA * Ic2_uA * c;
  if (!(s2 > 0.0))
    throw NumericError("SQUID at full frustration with equal junctions: L_J is singular");
  return kPhi0Over2Pi / std::sqrt(s2);  // pH
}

CouplerPoint amplitudes(const CouplerParams& p, double M_pH) {
  validate(p);
  const PlusFrame f = plus_frame(p, M_pH);
  const PlusFrame f0 = plus_frame(p, 0.0);
  CouplerPoint pt;
  pt.M = M_pH;
  // canonical frame is e^{-i w t}: conjugate the +frame results
  pt.b = std::conj(f.b);
  pt.r_in = std::conj(f.r_in);
  pt.t = std::conj(f.t);
  pt.r_out = std::abs(pt.t) > 0.0 ? -std::conj(pt.r_in) * pt.t / std::conj(pt.t)
                                  : -std::conj(pt.r_in);
  pt.delta_omega = -(p.omega0 / kPi) * std::arg(std::conj(f.r_in / f0.r_in));
  return pt;
}

double detuning(const CouplerParams& p, double M_pH) { return amplitudes(p, M_pH).delta_omega; }

double invert_M(const CouplerParams& p, double t_abs_target) {
  validate(p);
  if (t_abs_target < 0.0) throw ConfigError("|t| target must be non-negative");
  if (t_abs_target == 0.0) return 0.0;
  auto f = [&](double M) { return std::abs(plus_frame(p, M).t); };

  double lo = 0.0, hi = p.Mg / 8.0;
  double f_hi = f(hi);
  int guard = 0;
  while (f_hi < t_abs_target) {
    const double next = hi * 2.0;
    const double f_next = f(next);
    if (f_next <= f_hi)
      throw ConfigError("|t| = " + std::to_string(t_abs_target) +
                        " above the maximum of the monotone branch");
    lo = hi;
    hi = next;
    f_hi = f_next;
    if (++guard > 60) throw ConfigError("|t| target out of reachable range");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < t_abs_target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DetuningLinear detuning_linear(const CouplerParams& p) {
  validate(p);
  const double w = p.omega0;
  const double L1 = (p.L1g + p.Mg) * 1e-3;  // at M = 0
  const double L2 = (p.L2g + p.Mg) * 1e-3;
  const double Le = p.Le * 1e-3;
  const double b0 = std::abs(plus_frame(p, 0.0).b);
  DetuningLinear d;
  d.slope = -(w / kPi) * std::sqrt(1.0 + w * L2 / p.R_tl * (w * L2 / p.R_tl)) /
            std::sqrt(1.0 + b0 * b0) * std::sqrt(p.R_tl / p.R_res) * Le / (L1 + Le);
  return d;
}

double detuning_refined(const CouplerParams& p, double M_pH) {
  validate(p);
  const double w = p.omega0;
  const double Le = p.Le * 1e-3;
  const double M = M_pH * 1e-3;
  const double La = (p.L1g + p.Mg) * 1e-3 + Le;
  const double b0 = std::abs(plus_frame(p, 0.0).b);
  return -2.0 * w * w * Le * Le * M / ((1.0 + b0 * b0) * kPi * p.R_res * La * (La + M));
}

CouplerSchedule schedule(const CouplerParams& p, const std::vector<double>& pulse_abs, double t0,
                         double dt, double compensation) {
  if (compensation < 0.0 || compensation > 1.0)
    throw ConfigError("compensation fraction must lie in [0, 1]");
  if (pulse_abs.size() < 2 || !(dt > 0.0)) throw ConfigError("schedule needs a sampled pulse");
  CouplerSchedule s;
  s.t.t0 = s.delta_omega.t0 = t0;
  s.t.dt = s.delta_omega.dt = dt;
  s.t.v.resize(pulse_abs.size());
  s.delta_omega.v.resize(pulse_abs.size());
  s.M.resize(pulse_abs.size());
  for (std::size_t i = 0; i < pulse_abs.size(); ++i) {
    const double M = invert_M(p, pulse_abs[i]);
    const CouplerPoint pt = amplitudes(p, M);
    s.M[i] = M;
    s.t.v[i] = pt.t;
    s.delta_omega.v[i] = (1.0 - compensation) * pt.delta_omega;
  }
  s.t.build();
  s.delta_omega.build();
  return s;
}

CoupledSchedules apply_coupler(const ProtocolParams& protocol, const CouplerParams& params,
                               double compensation, std::size_t grid_n) {
  if (grid_n < 2) throw ConfigError("coupler schedule grid too coarse");
  const double dt = protocol.t_f / double(grid_n);
  std::vector<double> ae(grid_n + 1), ar(grid_n + 1);
  for (std::size_t i = 0; i <= grid_n; ++i) {
    const PulsePair pp = eval_ideal_clamped(protocol, dt * double(i));
    ae[i] = std::abs(pp.te);
    ar[i] = std::abs(pp.tr);
  }
  CouplerSchedule se = schedule(params, ae, 0.0, dt, compensation);
  CouplerSchedule sr = schedule(params, ar, 0.0, dt, compensation);
  CoupledSchedules out;
  out.shapes.e = std::move(se.t);
  out.shapes.r = std::move(sr.t);
  out.shapes.e.build();
  out.shapes.r.build();
  out.dw_e = std::move(se.delta_omega);
  out.dw_r = std::move(sr.delta_omega);
  return out;
}

}  // namespace qxfer
