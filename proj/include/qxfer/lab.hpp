#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qxfer/coupler.hpp"
#include "qxfer/dynamics.hpp"
#include "qxfer/reflections.hpp"

namespace qxfer {

// Sweepable parameters. "rel" axes are fractional deviations from the design
// value, "anti" moves the two resonators in opposite directions.
enum class Param {
  tmax_rel_e,
  tmax_rel_r,
  tmax_rel_both,
  tmax_rel_anti,
  tau_rel_e,
  tau_rel_r,
  tau_rel_both,
  tm_shift_e_ns,
  tm_shift_r_ns,
  tm_shift_both_ns,
  warp_e,
  warp_r,
  warp_both,
  warp_anti,
  sigma_ns,
  noise_amp,
  detuning_e_rad_ns,
  td_over_tau,
  phi_rad,
  tmax_abs,      // re-designs the protocol at this |t_max| (both couplers)
  compensation,  // coupler detuning compensation fraction
  eta_tl,
  T1_ns,  // applied to both resonators
};

Param param_from_string(const std::string& name);
std::string param_to_string(Param p);

struct Axis {
  Param param;
  std::vector<double> values;
};

struct SweepSpec {
  ProtocolParams design;
  DeformationSpec base_deform;

  std::optional<CouplerParams> coupler;  // route pulses through the circuit model
  double compensation = 1.0;

  std::optional<DelayConfig> delay;  // no-circulator model

  double eta_tl = 1.0;
  double T1_e = std::numeric_limits<double>::infinity();
  double T1_r = std::numeric_limits<double>::infinity();
  double dt_int = 0.0;

  std::vector<Axis> axes;
  int realizations = 1;  // per noisy grid point
  std::uint64_t master_seed = 0;
  int threads = 1;
};

struct SweepRow {
  std::vector<double> x;  // axis values, in axis order
  int realization = 0;
  double eta = 0.0;
  double phi_f = 0.0;
  std::string error;  // non-empty if this point failed
};

struct SweepTable {
  std::vector<std::string> axis_names;
  std::vector<SweepRow> rows;
};

// Deterministic cartesian sweep (last axis fastest); per-point seed is
// mix(master_seed, point_index, realization_index).
SweepTable run_sweep(const SweepSpec& spec);

// Least-squares pure-quadratic fits of -delta_eta = baseline_eta - eta.
// One axis: c x^2. Two axes: c1 x^2 + c2 y^2 + c3 x y.
struct FitResult {
  std::vector<double> coeff;
  std::vector<double> stderr_;
  double residual_norm = 0.0;
  std::string model;
};
FitResult fit_quadratic(const SweepTable& table, double baseline_eta);

// Deterministic efficiency prediction replacing amplitude noise by an
// effective increase of the leakage rates (transfer term unchanged).
double noise_oracle(const ProtocolParams& params, NoiseKind kind, double amp, double xi_var,
                    double dt_int = 0.0);

}  // namespace qxfer
