#include "qxfer/quantum.hpp"

#include <cmath>
#include <string>

namespace qxfer {

namespace {

double lfact(int k) { return std::lgamma(double(k) + 1.0); }

// eta^(p/2) with the 0^0 = 1 convention
double half_pow(double eta, int p) {
  if (p == 0) return 1.0;
  if (eta == 0.0) return 0.0;
  return std::exp(0.5 * double(p) * std::log(eta));
}

double int_pow(double x, int p) {
  if (p == 0) return 1.0;
  if (x == 0.0) return 0.0;
  return std::exp(double(p) * std::log(x));
}

DensityMatrix channel_core(const DensityMatrix& rho_in, const Channel& ch, int j_cutoff) {
  const int dim = int(rho_in.rows());
  const int N = dim - 1;
  const double eta = ch.eta, lam = 1.0 - ch.eta;
  if (!(eta >= 0.0) || eta > 1.0) throw ConfigError("channel eta must lie in [0, 1]");

  // trace mass routed to each ancilla photon number j; the input truncation
  // makes the sum finite, so j = N is always exact
  std::vector<double> mass(std::size_t(N) + 1, 0.0);
  for (int j = 0; j <= N; ++j)
    for (int n = 0; n + j <= N; ++n) {
      const double binom = std::exp(lfact(n + j) - lfact(n) - lfact(j));
      mass[std::size_t(j)] +=
          std::abs(rho_in(n + j, n + j)) * binom * int_pow(eta, n) * int_pow(lam, j);
    }
  int required = N;
  double tail = 0.0;
  while (required > 0 && tail + mass[std::size_t(required)] < 1e-12) {
    tail += mass[std::size_t(required)];
    --required;
  }
  if (j_cutoff >= 0 && j_cutoff < required)
    throw ConfigError("ancilla cutoff " + std::to_string(j_cutoff) +
                      " too small for the 1e-12 tail bound; need at least " +
                      std::to_string(required));
  const int jmax = j_cutoff < 0 ? N : std::min(j_cutoff, N);

  DensityMatrix rho = DensityMatrix::Zero(dim, dim);
  for (int n = 0; n <= N; ++n)
    for (int m = 0; m <= N; ++m) {
      Cxd acc(0.0, 0.0);
      for (int j = 0; j <= jmax && n + j <= N && m + j <= N; ++j) {
        const double w = std::exp(0.5 * (lfact(n + j) + lfact(m + j) - lfact(n) - lfact(m)) -
                                  lfact(j));
        acc += rho_in(n + j, m + j) * w * half_pow(eta, n + m) * int_pow(lam, j);
      }
      rho(n, m) = acc * std::polar(1.0, double(n - m) * ch.phi_f);
    }
  return rho;
}

}  // namespace

FockVector::FockVector(std::vector<Cxd> amps) : a(std::move(amps)) {
  if (a.empty()) throw ConfigError("Fock vector needs at least the vacuum amplitude");
  double n2 = 0.0;
  for (const Cxd& c : a) n2 += std::norm(c);
  if (!(n2 > 0.0)) throw ConfigError("Fock vector must be nonzero");
  const double inv = 1.0 / std::sqrt(n2);
  for (Cxd& c : a) c *= inv;
}

DensityMatrix apply_channel(const FockVector& psi_in, const Channel& ch, int j_cutoff) {
  const int dim = int(psi_in.a.size());
  DensityMatrix rho_in(dim, dim);
  for (int n = 0; n < dim; ++n)
    for (int m = 0; m < dim; ++m) rho_in(n, m) = psi_in.a[std::size_t(n)] * std::conj(psi_in.a[std::size_t(m)]);
  return channel_core(rho_in, ch, j_cutoff);
}

DensityMatrix apply_channel(const DensityMatrix& rho_in, const Channel& ch, int j_cutoff) {
  if (rho_in.rows() != rho_in.cols() || rho_in.rows() < 1)
    throw ConfigError("density matrix must be square and non-empty");
  return channel_core(rho_in, ch, j_cutoff);
}

double state_fidelity(const FockVector& psi_in, const DensityMatrix& rho_fin) {
  if (rho_fin.rows() != long(psi_in.a.size()))
    throw ConfigError("state/density-matrix dimension mismatch");
  Cxd acc(0.0, 0.0);
  for (long n = 0; n < rho_fin.rows(); ++n)
    for (long m = 0; m < rho_fin.cols(); ++m)
      acc += std::conj(psi_in.a[std::size_t(n)]) * rho_fin(n, m) * psi_in.a[std::size_t(m)];
  return acc.real();
}

Eigen::Matrix2cd qubit_channel(Cxd alpha, Cxd beta, const Channel& ch) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-9)
    throw ConfigError("qubit amplitudes must be normalized");
  const double eta = ch.eta;
  Eigen::Matrix2cd rho;
  rho(0, 0) = std::norm(alpha) + (1.0 - eta) * std::norm(beta);
  rho(1, 1) = eta * std::norm(beta);
  rho(0, 1) = std::sqrt(eta) * std::polar(1.0, -ch.phi_f) * alpha * std::conj(beta);
  rho(1, 0) = std::conj(rho(0, 1));
  return rho;
}

double qubit_state_fidelity(Cxd alpha, Cxd beta, const Channel& ch) {
  const double a2 = std::norm(alpha), b2 = std::norm(beta);
  return a2 * a2 + ch.eta * b2 * b2 +
         a2 * b2 * (1.0 - ch.eta + 2.0 * std::sqrt(ch.eta) * std::cos(ch.phi_f));
}

ProcessFidelity process_fidelity(const Channel& ch) {
  const double s = std::sqrt(ch.eta);
  return {(1.0 + s) * (1.0 + s) / 4.0,
          (1.0 + ch.eta + 2.0 * s * std::cos(ch.phi_f)) / 4.0};
}

EnvFidelity env_fidelity(double eta, const std::vector<double>& beta_sq) {
  if (!(eta >= 0.0) || eta > 1.0) throw ConfigError("eta must lie in [0, 1]");
  if (beta_sq.empty()) throw ConfigError("environment distribution must be non-empty");
  double sum = 0.0;
  for (double p : beta_sq) {
    if (p < -1e-12) throw ConfigError("environment probabilities must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("environment distribution must be normalized");

  const double s = std::sqrt(eta);
  const double base = (3.0 + eta + 2.0 * s) / 6.0;
  EnvFidelity out;
  out.f_avg = base;
  out.C.assign(beta_sq.size(), 0.0);
  for (std::size_t n = 1; n < beta_sq.size(); ++n) {
    const double nd = double(n);
    const double Cn = (base * (1.0 - int_pow(eta, int(n))) * 6.0 +
                       nd * (1.0 - eta) * int_pow(eta, int(n) - 1) *
                           (2.0 * eta + 2.0 * s - (1.0 - eta) * (2.0 * nd + 1.0))) /
                      6.0;
    out.C[n] = Cn;
    out.f_avg -= Cn * beta_sq[n];
  }
  return out;
}

}  // namespace qxfer
