#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qxfer/pulse.hpp"

namespace qxfer {

// Circuit constants of the SQUID-based tunable coupler. Units: Ohm, rad/ns,
// pH — chosen so omega*L/R stays near unity.
struct CouplerParams {
  double R_res = 80.0;   // resonator wave impedance
  double R_tl = 50.0;    // transmission-line impedance
  double omega0 = 0.0;   // angular frequency (rad/ns)
  double L1g = 480.0;    // transformer geometric inductances (pH)
  double L2g = 480.0;
  double Mg = 140.0;     // geometric mutual inductance (pH)
  double Le = 180.0;     // effective tap inductance (pH)
  std::optional<double> Ic1, Ic2;  // SQUID critical currents (uA)
};

// Scattering data at one mutual inductance, in the e^{-i w t} frame.
struct CouplerPoint {
  double M = 0.0;  // pH
  Cx t;            // effective transmission amplitude (impedance-normalized)
  Cx r_in, r_out;  // reflection amplitudes seen from the resonator / line
  Cx b;            // intermediate circuit ratio
  double delta_omega = 0.0;  // frequency pull (rad/ns)
};

// L_e = (R_res/omega) tan(2 pi d/lambda); rejects taps at or past the
// quarter-wave pole.
double effective_inductance(double R_res, double omega, double d_over_lambda);

// dc-SQUID Josephson inductance versus external flux (flux in units of Phi0).
double flux_to_LJ(double Ic1_uA, double Ic2_uA, double phi_ext_over_phi0);

CouplerPoint amplitudes(const CouplerParams& params, double M_pH);

// Frequency pull relative to the M = 0 reference point.
double detuning(const CouplerParams& params, double M_pH);

// Inverse of |t|(M) on the monotone branch from M = 0.
double invert_M(const CouplerParams& params, double t_abs_target);

struct DetuningLinear {
  double slope;  // d(delta_omega)/d|t| at M -> 0 (rad/ns per unit |t|)
};
DetuningLinear detuning_linear(const CouplerParams& params);

// Refined closed form keeping M in the denominator; captures most of the
// nonlinearity of the exact curve.
double detuning_refined(const CouplerParams& params, double M_pH);

// Time-dependent control schedule reproducing a target |t|(t): per-sample
// M from invert_M, the full complex t (time-varying phase) and the residual
// detuning (1-c)*delta_omega left after compensating the fraction c.
struct CouplerSchedule {
  SampledShape t;        // complex transmission amplitude
  RealShape delta_omega; // residual detuning (rad/ns)
  std::vector<double> M; // pH, same grid
};
CouplerSchedule schedule(const CouplerParams& params, const std::vector<double>& pulse_abs,
                         double t0, double dt, double compensation);

// Both protocol pulses routed through the circuit model; output plugs
// straight into SimConfig.
struct CoupledSchedules {
  ShapedPulses shapes;
  RealShape dw_e, dw_r;
};
CoupledSchedules apply_coupler(const ProtocolParams& protocol, const CouplerParams& params,
                               double compensation, std::size_t grid_n = 4096);

}  // namespace qxfer
