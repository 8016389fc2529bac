#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "qxfer/spline.hpp"

namespace qxfer {

using Cx = std::complex<double>;

// Full parameter set of the two-coupler pulse shapes. Times in ns.
struct ProtocolParams {
  Cx t_max_e{0.05, 0.0};  // transmission-amplitude maxima (dimensionless)
  Cx t_max_r{0.05, 0.0};
  double tau_rt_e = 0.0;  // resonator round-trip times
  double tau_rt_r = 0.0;
  double tau_e = 0.0;     // buildup/leakage times tau = tau_rt/|t_max|^2
  double tau_r = 0.0;
  double t_m_e = 0.0;     // mid-times of the two shapes (equal by design)
  double t_m_r = 0.0;
  double t_f = 0.0;       // total duration
  double eta_design = 0.0;
};

// tau_rt = pi/omega0 for a quarter-wave resonator; freq in GHz, result in ns.
inline double round_trip_time_ns(double freq_GHz) { return 0.5 / freq_GHz; }

ProtocolParams design_protocol(Cx t_max_e, Cx t_max_r, double tau_rt_ns, double eta_design);

struct PulsePair {
  Cx te, tr;
};

// Closed-form shapes; accepts independent actual parameters inside `params`.
// Throws ConfigError for t outside [0, t_f].
PulsePair eval_ideal(const ProtocolParams& params, double t);

// Same closed forms with t clamped into [0, t_f] (constant continuation);
// used by the deformation pipeline and the integrator end-point handling.
PulsePair eval_ideal_clamped(const ProtocolParams& params, double t);

struct OnOffRatios {
  double ratio_e, ratio_r;
};
OnOffRatios on_off_ratios(const ProtocolParams& params);

// Uniformly sampled complex shape with cubic interpolation and constant
// continuation outside the grid.
struct SampledShape {
  double t0 = 0.0, dt = 0.0;
  std::vector<Cx> v;
  CubicSpline re, im;

  void build();  // constructs the two splines from v
  Cx eval(double t) const { return {re.eval(t), im.eval(t)}; }
};

// Real-valued sampled schedule (e.g. a detuning waveform).
struct RealShape {
  double t0 = 0.0, dt = 0.0;
  std::vector<double> v;
  CubicSpline s;

  void build() { s = CubicSpline(t0, dt, v); }
  double eval(double t) const { return s.eval(t); }
};

enum class NoiseKind { none, multiplicative, additive };

// Pulse-level imperfections, composed in the fixed order:
// actual-parameter substitution -> warp -> noise -> Gaussian filter.
struct DeformationSpec {
  std::optional<Cx> t_max_e_a, t_max_r_a;      // miscalibrated maxima
  std::optional<double> tau_e_a, tau_r_a;      // miscalibrated buildup times
  std::optional<double> t_m_e_a, t_m_r_a;      // shifted mid-times
  double alpha_e = 0.0, alpha_r = 0.0;         // warping coefficients
  double sigma = 0.0;                          // Gaussian filter width (ns)
  NoiseKind noise = NoiseKind::none;
  double noise_amp = 0.0;                      // a
  double noise_dt = 1.0;                       // noise grid step (ns)
  std::uint64_t seed = 0;
};

bool is_identity(const DeformationSpec& spec);

// The shapes actually sent to the couplers, sampled on a uniform grid
// covering [0, t_f] (default step t_f/2^14).
struct ShapedPulses {
  SampledShape e, r;
};
ShapedPulses apply_deformations(const ProtocolParams& params, const DeformationSpec& spec,
                                std::size_t grid_n = std::size_t(1) << 14);

// Smooth random trace: i.i.d. standard normal nodes on a dt grid joined by a
// natural cubic spline; `variance` is the measured continuous-time variance
// of this trace over [0, t_f].
struct NoiseTrace {
  double dt = 0.0;
  std::vector<double> nodes;
  CubicSpline spline;
  double variance = 0.0;

  double eval(double t) const { return spline.eval(t); }
};
NoiseTrace generate_noise_trace(double dt_grid, double t_f, std::uint64_t seed);

// Closed-form bounds for the single-tunable-coupler variant.
struct SingleCouplerBounds {
  double t_f;
  double on_off_ratio;
  double kappa_r_opt;
};
SingleCouplerBounds single_coupler_bounds(double kappa_max, double eta);

// Rate schedules reproducing an arbitrary transmitted waveform A(t), sampled
// with step dt starting at t=0. kappa maxima of +infinity disable the
// respective feasibility checks.
struct WaveformCouplings {
  std::vector<double> kappa_e, kappa_r;
  double loss_e, loss_r;
};
WaveformCouplings couplings_from_waveform(const std::vector<double>& A, double dt,
                                          double G0_abs2, double kappa_e_max,
                                          double kappa_r_max);

}  // namespace qxfer
