#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qxfer/pulse.hpp"

namespace qxfer {

// One full experiment description for the circulator-protected setup.
struct SimConfig {
  ProtocolParams design;
  std::optional<ShapedPulses> shapes;  // if absent: closed-form ideal pulses

  // detuning schedules (rad/ns): constant part plus optional sampled waveform
  double delta_omega_e_const = 0.0;
  double delta_omega_r_const = 0.0;
  std::optional<RealShape> delta_omega_e, delta_omega_r;

  double T1_e = std::numeric_limits<double>::infinity();  // intrinsic lifetimes (ns)
  double T1_r = std::numeric_limits<double>::infinity();
  double eta_tl = 1.0;  // transmission-line energy survival

  Cx G0{1.0, 0.0}, B0{0.0, 0.0};
  double dt_int = 0.0;  // integrator step; 0 -> min(tau_e, tau_r)/1000

  // effective-leakage modifiers used by the noise oracle: the decay rate of
  // each resonator becomes scale*kappa + offset while the transfer term keeps
  // the bare kappas
  double leak_scale_e = 1.0, leak_scale_r = 1.0;
  double leak_offset_e = 0.0, leak_offset_r = 0.0;

  bool record_trajectory = true;
};

struct FieldTrajectory {
  std::vector<double> t;
  std::vector<Cx> G, B, A, F;  // A, F in photons^(1/2)/ns^(1/2)
};

struct TransferOutcome {
  double eta = 0.0;
  double phi_f = 0.0;
  double residual_emitter = 0.0;  // |G(t_f)|^2
  double received = 0.0;          // |B(t_f)|^2
  double reflected = 0.0;         // integral of |F|^2
  double dissipated = 0.0;        // remainder of the ledger
  std::string warning;
};

std::pair<FieldTrajectory, TransferOutcome> simulate(const SimConfig& config);

struct InefficiencyPrediction {
  double two_term;   // [tau_r e^{-t_m/tau_r} + tau_e e^{-(t_f-t_m)/tau_e}]/(tau_e+tau_r)
  double optimized;  // exp[-t_f/(tau_e+tau_r)]
};
InefficiencyPrediction analytic_inefficiency(double tau_e, double tau_r, double t_m, double t_f);

// Combined closed-form efficiency with line loss and intrinsic decay.
double dissipation_scaling(double eta_design, double eta_tl, double T1_e, double T1_r, double t_f);

// Quadratic sensitivity coefficient for constant frequency mismatch.
double detuning_coefficient(double eta_design);

}  // namespace qxfer
