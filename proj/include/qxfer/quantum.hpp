#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qxfer/error.hpp"

namespace qxfer {

using Cxd = std::complex<double>;
using DensityMatrix = Eigen::MatrixXcd;

// Truncated bosonic state; normalized on construction.
struct FockVector {
  std::vector<Cxd> a;  // amplitudes of |0..N>

  explicit FockVector(std::vector<Cxd> amps);
  int cutoff() const { return int(a.size()) - 1; }
};

// The transfer acts on the travelling mode as a beam splitter of
// transmissivity eta with a correctable output phase phi_f.
struct Channel {
  double eta = 1.0;
  double phi_f = 0.0;
};

// Reduced output density matrix after tracing the loss mode. j_cutoff < 0
// uses the exact value (input truncation makes the ancilla sum finite).
DensityMatrix apply_channel(const FockVector& psi_in, const Channel& ch, int j_cutoff = -1);
DensityMatrix apply_channel(const DensityMatrix& rho_in, const Channel& ch, int j_cutoff = -1);

double state_fidelity(const FockVector& psi_in, const DensityMatrix& rho_fin);

// Closed-form single-photon-qubit results.
Eigen::Matrix2cd qubit_channel(Cxd alpha, Cxd beta, const Channel& ch);
double qubit_state_fidelity(Cxd alpha, Cxd beta, const Channel& ch);

struct ProcessFidelity {
  double corrected;    // (1 + sqrt(eta))^2 / 4
  double uncorrected;  // (1 + eta + 2 sqrt(eta) cos(phi_f)) / 4
};
ProcessFidelity process_fidelity(const Channel& ch);

// Average qubit fidelity when the ancillary port carries photons with
// number distribution p_n = |beta_n|^2 (single-beam-splitter environment).
struct EnvFidelity {
  double f_avg;
  std::vector<double> C;  // penalty coefficients C_n used
};
EnvFidelity env_fidelity(double eta, const std::vector<double>& beta_sq);

}  // namespace qxfer
