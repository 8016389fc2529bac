#pragma once

#include <utility>

#include "qxfer/dynamics.hpp"

namespace qxfer {

// Finite transmission line without a circulator: the back-propagating field
// re-enters the emitter after a round-trip delay t_d with accumulated phase
// phi (treated as an independent parameter).
struct DelayConfig {
  double t_d = 0.0;  // ns
  double phi = 0.0;  // rad, in [0, 2pi)
};

// Integrates the delay equations in the all-real phase convention
// (amplitudes real and positive, r_in -> +1, r_out -> -1):
//   dG/dt = -kappa_e/2 G + sqrt(kappa_e) e^{-i phi} F(t - t_d)
//   dB/dt = -kappa_r/2 B + sqrt(kappa_r) A
//   A     = sqrt(kappa_e) G - e^{-i phi} F(t - t_d),   F = sqrt(kappa_r) B - A
// with F = 0 for t < 0. The model is lossless: configs with eta_tl != 1,
// finite T1, or detuning schedules are rejected. The ledger's `reflected`
// entry is the energy still in flight on the line at t_f.
std::pair<FieldTrajectory, TransferOutcome> simulate_with_delay(const SimConfig& config,
                                                                const DelayConfig& delay);

struct WorstCase {
  double coherent;  // (sqrt(l_G) + sqrt(l_F))^2
  double majorant;  // 2 (l_G + l_F)
};
WorstCase worst_case_bound(double loss_G, double loss_F);

}  // namespace qxfer
