#include "qxfer/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qxfer/rng.hpp"

namespace qxfer {

namespace {

double clampd(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

}  // namespace

ProtocolParams design_protocol(Cx t_max_e, Cx t_max_r, double tau_rt_ns, double eta_design) {
  const double ae = std::abs(t_max_e), ar = std::abs(t_max_r);
  if (!(ae > 0.0) || ae > 0.2 || !(ar > 0.0) || ar > 0.2)
    throw ConfigError("amplitude maxima must satisfy 0 < |t_max| <= 0.2 (got " +
                      std::to_string(ae) + ", " + std::to_string(ar) + ")");
  if (!(eta_design > 0.0) || !(eta_design < 1.0))
    throw ConfigError("eta_design must lie in (0, 1)");
  if (!(tau_rt_ns > 0.0)) throw ConfigError("round-trip time must be positive");

  ProtocolParams p;
  p.t_max_e = t_max_e;
  p.t_max_r = t_max_r;
  p.tau_rt_e = p.tau_rt_r = tau_rt_ns;
  p.tau_e = tau_rt_ns / (ae * ae);
  p.tau_r = tau_rt_ns / (ar * ar);
  p.eta_design = eta_design;
  p.t_f = -(p.tau_e + p.tau_r) * std::log1p(-eta_design);
  // optimal mid-time: t_m/tau_r = (t_f - t_m)/tau_e
  p.t_m_e = p.t_m_r = p.t_f * p.tau_r / (p.tau_e + p.tau_r);
  return p;
}

PulsePair eval_ideal_clamped(const ProtocolParams& p, double t) {
  t = clampd(t, 0.0, p.t_f);
  PulsePair out;
  const double re = p.tau_e / p.tau_r;  // ratio in the emitter branch
  if (t >= p.t_m_e) {
    out.te = p.t_max_e;
  } else {
    out.te = p.t_max_e * std::sqrt(re) /
             std::sqrt((1.0 + re) * std::exp((p.t_m_e - t) / p.tau_r) - 1.0);
  }
  const double rr = p.tau_r / p.tau_e;
  if (t <= p.t_m_r) {
    out.tr = p.t_max_r;
  } else {
    out.tr = p.t_max_r * std::sqrt(rr) /
             std::sqrt((1.0 + rr) * std::exp((t - p.t_m_r) / p.tau_e) - 1.0);
  }
  return out;
}

PulsePair eval_ideal(const ProtocolParams& p, double t) {
  const double slack = 1e-12 * p.t_f;
  if (t < -slack || t > p.t_f + slack)
    throw ConfigError("pulse evaluation time " + std::to_string(t) + " outside [0, t_f]");
  return eval_ideal_clamped(p, t);
}

OnOffRatios on_off_ratios(const ProtocolParams& p) {
  const double one_m_eta = 1.0 - p.eta_design;
  return {std::sqrt((1.0 + p.tau_r / p.tau_e) / one_m_eta),
          std::sqrt((1.0 + p.tau_e / p.tau_r) / one_m_eta)};
}

void SampledShape::build() {
  std::vector<double> vr(v.size()), vi(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    vr[i] = v[i].real();
    vi[i] = v[i].imag();
  }
  re = CubicSpline(t0, dt, std::move(vr));
  im = CubicSpline(t0, dt, std::move(vi));
}

bool is_identity(const DeformationSpec& s) {
  return !s.t_max_e_a && !s.t_max_r_a && !s.tau_e_a && !s.tau_r_a && !s.t_m_e_a && !s.t_m_r_a &&
         s.alpha_e == 0.0 && s.alpha_r == 0.0 && s.sigma == 0.0 &&
         (s.noise == NoiseKind::none || s.noise_amp == 0.0);
}

namespace {

// shape value after actual-parameter substitution, warping and noise,
// evaluated at a time clamped into [0, t_f]
Cx pre_filter_value(const ProtocolParams& actual, double t_f_design, bool emitter, double alpha,
                    const NoiseTrace* noise, NoiseKind kind, double amp, double t) {
  t = clampd(t, 0.0, t_f_design);
  PulsePair pp = eval_ideal_clamped(actual, t);
  Cx v = emitter ? pp.te : pp.tr;
  const Cx vmax = emitter ? actual.t_max_e : actual.t_max_r;
  const double amax = std::abs(vmax);
  if (alpha != 0.0) v *= 1.0 + alpha * (std::abs(v) - amax) / amax;
  if (noise) {
    const double xi = noise->eval(t);
    if (kind == NoiseKind::multiplicative)
      v *= 1.0 + amp * xi;
    else if (kind == NoiseKind::additive)
      v += amp * vmax * xi;
  }
  return v;
}

}  // namespace

ShapedPulses apply_deformations(const ProtocolParams& params, const DeformationSpec& spec,
                                std::size_t grid_n) {
  if (spec.sigma < 0.0) throw ConfigError("filter width must be non-negative");
  if (spec.sigma > params.t_f / 2.0)
    throw ConfigError("filter width " + std::to_string(spec.sigma) +
                      " ns exceeds t_f/2; outside the modeled regime");
  if (spec.noise_amp < 0.0) throw ConfigError("noise amplitude must be non-negative");
  if (!(spec.noise_dt > 0.0)) throw ConfigError("noise grid step must be positive");
  if (grid_n < 2) throw ConfigError("sampling grid too coarse");

  ProtocolParams actual = params;
  if (spec.t_max_e_a) actual.t_max_e = *spec.t_max_e_a;
  if (spec.t_max_r_a) actual.t_max_r = *spec.t_max_r_a;
  if (spec.tau_e_a) actual.tau_e = *spec.tau_e_a;
  if (spec.tau_r_a) actual.tau_r = *spec.tau_r_a;
  if (spec.t_m_e_a) actual.t_m_e = *spec.t_m_e_a;
  if (spec.t_m_r_a) actual.t_m_r = *spec.t_m_r_a;
  if (!(std::abs(actual.t_max_e) > 0.0) || !(std::abs(actual.t_max_r) > 0.0))
    throw ConfigError("actual amplitude maxima must be nonzero");
  if (!(actual.tau_e > 0.0) || !(actual.tau_r > 0.0))
    throw ConfigError("actual buildup times must be positive");
  if (!(actual.t_m_e > 0.0) || actual.t_m_e >= params.t_f || !(actual.t_m_r > 0.0) ||
      actual.t_m_r >= params.t_f)
    throw ConfigError("actual mid-times must lie inside (0, t_f)");

  const bool noisy = spec.noise != NoiseKind::none && spec.noise_amp > 0.0;
  NoiseTrace trace_e, trace_r;
  if (noisy) {
    trace_e = generate_noise_trace(spec.noise_dt, params.t_f, mix_seed(spec.seed, 0));
    trace_r = generate_noise_trace(spec.noise_dt, params.t_f, mix_seed(spec.seed, 1));
  }

  // Gaussian filter: window +-6 sigma, step sigma/8, trapezoid weights,
  // explicitly normalized; shapes are constant-extended past [0, t_f].
  std::vector<double> w;
  double wstep = 0.0;
  if (spec.sigma > 0.0) {
    const int K = 48;
    wstep = spec.sigma / 8.0;
    w.resize(2 * K + 1);
    double sum = 0.0;
    for (int k = -K; k <= K; ++k) {
      double x = double(k) / 8.0;
      double wk = std::exp(-0.5 * x * x);
      if (k == -K || k == K) wk *= 0.5;
      w[std::size_t(k + K)] = wk;
      sum += wk;
    }
    for (double& wk : w) wk /= sum;
  }

  ShapedPulses out;
  for (int which = 0; which < 2; ++which) {
    const bool emitter = which == 0;
    SampledShape& s = emitter ? out.e : out.r;
    s.t0 = 0.0;
    s.dt = params.t_f / double(grid_n);
    s.v.resize(grid_n + 1);
    const double alpha = emitter ? spec.alpha_e : spec.alpha_r;
    const NoiseTrace* tr = noisy ? (emitter ? &trace_e : &trace_r) : nullptr;
    for (std::size_t i = 0; i <= grid_n; ++i) {
      const double t = s.dt * double(i);
      Cx val;
      if (w.empty()) {
        val = pre_filter_value(actual, params.t_f, emitter, alpha, tr, spec.noise, spec.noise_amp, t);
      } else {
        val = 0.0;
        const int K = int(w.size() / 2);
        for (int k = -K; k <= K; ++k)
          val += w[std::size_t(k + K)] * pre_filter_value(actual, params.t_f, emitter, alpha, tr,
                                                          spec.noise, spec.noise_amp,
                                                          t + double(k) * wstep);
      }
      if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
        throw NumericError("non-finite pulse sample produced by deformation");
      s.v[i] = val;
    }
    s.build();
  }
  return out;
}

NoiseTrace generate_noise_trace(double dt_grid, double t_f, std::uint64_t seed) {
  if (!(dt_grid > 0.0)) throw ConfigError("noise grid step must be positive");
  if (!(t_f > 0.0)) throw ConfigError("trace duration must be positive");
  NoiseTrace tr;
  tr.dt = dt_grid;
  const std::size_t n_nodes = std::max<std::size_t>(2, std::size_t(std::ceil(t_f / dt_grid)) + 1);
  tr.nodes.resize(n_nodes);
  Rng rng(seed);
  for (double& x : tr.nodes) x = rng.next_normal();
  tr.spline = CubicSpline(0.0, dt_grid, tr.nodes);

  // measured continuous-time variance of the interpolated trace on [0, t_f]
  const std::size_t nf = std::size_t(std::ceil(t_f / (dt_grid / 16.0)));
  const double h = t_f / double(nf);
  double acc = 0.0;
  for (std::size_t i = 0; i <= nf; ++i) {
    double x = tr.spline.eval(h * double(i));
    double wq = (i == 0 || i == nf) ? 0.5 : 1.0;
    acc += wq * x * x;
  }
  tr.variance = acc * h / t_f;
  return tr;
}

SingleCouplerBounds single_coupler_bounds(double kappa_max, double eta) {
  if (!(kappa_max > 0.0)) throw ConfigError("kappa_max must be positive");
  if (!(eta > 0.0) || !(eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  const double one_m_eta = 1.0 - eta;
  const double LN = 3.0 + std::log(1.0 / one_m_eta);
  SingleCouplerBounds b;
  b.t_f = LN / (kappa_max * one_m_eta);
  b.on_off_ratio = std::sqrt(LN) / one_m_eta;
  b.kappa_r_opt = one_m_eta * kappa_max / (1.0 + 1.0 / LN);
  return b;
}

namespace {

// cumulative integral of y^2 on a uniform grid via per-interval 4-point
// Newton-Cotes (falls back to trapezoid for very short inputs)
std::vector<double> cumulative_sq_integral(const std::vector<double>& y, double dt) {
  const std::size_t n = y.size();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = y[i] * y[i];
  std::vector<double> I(n, 0.0);
  if (n < 4) {
    for (std::size_t i = 1; i < n; ++i) I[i] = I[i - 1] + 0.5 * dt * (f[i - 1] + f[i]);
    return I;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double seg;
    if (i == 0)
      seg = dt * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0;
    else if (i == n - 2)
      seg = dt * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]) / 24.0;
    else
      seg = dt * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]) / 24.0;
    I[i + 1] = I[i] + seg;
  }
  return I;
}

}  // namespace

WaveformCouplings couplings_from_waveform(const std::vector<double>& A, double dt, double G0_abs2,
                                          double kappa_e_max, double kappa_r_max) {
  if (A.size() < 2) throw ConfigError("waveform needs at least 2 samples");
  if (!(dt > 0.0)) throw ConfigError("waveform step must be positive");
  if (!(G0_abs2 > 0.0)) throw ConfigError("initial energy must be positive");
  for (std::size_t i = 0; i < A.size(); ++i)
    if (!(A[i] >= 0.0) || !std::isfinite(A[i]))
      throw ConfigError("waveform sample " + std::to_string(i) + " must be finite and >= 0");

  const std::vector<double> I = cumulative_sq_integral(A, dt);
  const double A0sq = A[0] * A[0];
  const bool check_e = std::isfinite(kappa_e_max);
  const bool check_r = std::isfinite(kappa_r_max);
  const double r_base = check_r ? A0sq / kappa_r_max : 0.0;

  WaveformCouplings out;
  out.kappa_e.resize(A.size());
  out.kappa_r.resize(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) {
    const double Asq = A[i] * A[i];
    const double den_e = G0_abs2 - I[i];
    if (Asq == 0.0) {
      out.kappa_e[i] = 0.0;
    } else {
      if (!(den_e > 0.0))
        throw ConfigError("waveform infeasible at sample " + std::to_string(i) +
                          ": transmitted energy exhausts the emitter");
      out.kappa_e[i] = Asq / den_e;
      if (check_e && out.kappa_e[i] > kappa_e_max)
        throw ConfigError("waveform infeasible at sample " + std::to_string(i) +
                          ": kappa_e = " + std::to_string(out.kappa_e[i]) +
                          " exceeds kappa_e_max = " + std::to_string(kappa_e_max));
    }
    const double den_r = r_base + I[i];
    if (Asq == 0.0) {
      out.kappa_r[i] = 0.0;
    } else if (den_r > 0.0) {
      out.kappa_r[i] = Asq / den_r;
      if (check_r && out.kappa_r[i] > kappa_r_max * (1.0 + 1e-12))
        throw ConfigError("waveform infeasible at sample " + std::to_string(i) +
                          ": kappa_r = " + std::to_string(out.kappa_r[i]) +
                          " exceeds kappa_r_max = " + std::to_string(kappa_r_max));
    } else {
      out.kappa_r[i] = std::numeric_limits<double>::infinity();
    }
  }
  out.loss_e = 1.0 - I.back() / G0_abs2;
  out.loss_r = r_base / G0_abs2;
  return out;
}

}  // namespace qxfer
