#include "qxfer/reflections.hpp"

#include <algorithm>
#include <cmath>

#include "qxfer/error.hpp"

namespace qxfer {

namespace {

struct Rates {
  double ke, kr, se, sr;  // kappas and their square roots
};

struct DelayStepper {
  const SimConfig& cfg;
  Cx phase;  // e^{-i phi}

  Rates rates(double t) const {
    double ae, ar;
    if (cfg.shapes) {
      ae = std::abs(cfg.shapes->e.eval(t));
      ar = std::abs(cfg.shapes->r.eval(t));
    } else {
      PulsePair pp = eval_ideal_clamped(cfg.design, t);
      ae = std::abs(pp.te);
      ar = std::abs(pp.tr);
    }
    Rates r;
    r.ke = ae * ae / cfg.design.tau_rt_e;
    r.kr = ar * ar / cfg.design.tau_rt_r;
    r.se = std::sqrt(r.ke);
    r.sr = std::sqrt(r.kr);
    return r;
  }

  void deriv(const Rates& r, Cx G, Cx B, Cx Fd, Cx& dG, Cx& dB) const {
    const Cx fin = phase * Fd;
    dG = -0.5 * r.ke * G + r.se * fin;
    dB = -0.5 * r.kr * B + r.sr * (r.se * G - fin);
  }

  void outputs(const Rates& r, Cx G, Cx B, Cx Fd, Cx& A, Cx& F) const {
    A = r.se * G - phase * Fd;
    F = r.sr * B - A;
  }
};

// Catmull-Rom interpolation of the stored F history (uniform half-step
// lattice); times before the protocol start give zero.
Cx interp_history(const std::vector<Cx>& Fh, double half, double t) {
  if (t <= 0.0) return Cx(0.0, 0.0);
  const double u = t / half;
  const long last = long(Fh.size()) - 1;
  long i = long(u);
  if (i >= last) return Fh.back();
  const double s = u - double(i);
  auto at = [&](long k) { return Fh[std::size_t(std::clamp(k, 0L, last))]; };
  const Cx p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
  return p1 + s * (0.5 * (p2 - p0)) + (s * s) * (p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3) +
         (s * s * s) * (1.5 * (p1 - p2) + 0.5 * (p3 - p0));
}

}  // namespace

std::pair<FieldTrajectory, TransferOutcome> simulate_with_delay(const SimConfig& cfg,
                                                                const DelayConfig& delay) {
  const ProtocolParams& p = cfg.design;
  if (!(p.t_f > 0.0) || !(p.tau_rt_e > 0.0) || !(p.tau_rt_r > 0.0))
    throw ConfigError("protocol parameters incomplete");
  if (!(delay.t_d > 0.0))
    throw ConfigError("degenerate delay t_d <= 0 refused (no valid history)");
  if (cfg.eta_tl != 1.0 || !std::isinf(cfg.T1_e) || !std::isinf(cfg.T1_r))
    throw ConfigError("delay model is lossless; eta_tl must be 1 and T1 infinite");
  if (cfg.delta_omega_e_const != 0.0 || cfg.delta_omega_r_const != 0.0 || cfg.delta_omega_e ||
      cfg.delta_omega_r)
    throw ConfigError("delay model uses the real-amplitude convention; detuning unsupported");

  const double tau_min = std::min(p.tau_e, p.tau_r);
  const double dt_req = cfg.dt_int > 0.0 ? cfg.dt_int : tau_min / 1000.0;
  if (dt_req > tau_min / 100.0)
    throw ConfigError("integration step larger than tau_min/100 rejected (accuracy guard)");

  // step adjusted downward so the delay is an exact integer number of steps
  const std::size_t m = std::size_t(std::ceil(delay.t_d / dt_req));
  const double h = delay.t_d / double(m);
  const double half = 0.5 * h;
  std::size_t N = std::size_t(p.t_f / h);
  double rem = p.t_f - double(N) * h;
  if (rem < 1e-9 * h) rem = 0.0;

  DelayStepper st{cfg, std::polar(1.0, -delay.phi)};
  FieldTrajectory traj;
  Cx G = cfg.G0, B = cfg.B0;

  // F samples on the half-step lattice k*h/2, filled causally
  std::vector<Cx> Fh(2 * N + 1, Cx(0.0, 0.0));
  auto delayed = [&](long half_idx) {
    return half_idx < 0 ? Cx(0.0, 0.0) : Fh[std::size_t(half_idx)];
  };

  {
    const Rates r0 = st.rates(0.0);
    Cx A, F;
    st.outputs(r0, G, B, Cx(0.0, 0.0), A, F);
    Fh[0] = F;
  }

  auto record = [&](double t, const Rates& r, Cx Fd) {
    if (!cfg.record_trajectory) return;
    Cx A, F;
    st.outputs(r, G, B, Fd, A, F);
    traj.t.push_back(t);
    traj.G.push_back(G);
    traj.B.push_back(B);
    traj.A.push_back(A);
    traj.F.push_back(F);
  };

  for (std::size_t n = 0; n < N; ++n) {
    const double t = h * double(n);
    const long base = 2 * long(n) - 2 * long(m);
    const Cx Fd0 = delayed(base), Fd1 = delayed(base + 1), Fd2 = delayed(base + 2);
    const Rates r0 = st.rates(t);
    const Rates rm = st.rates(t + half);
    const Rates r1 = st.rates(t + h);
    record(t, r0, Fd0);

    Cx k1G, k1B, k2G, k2B, k3G, k3B, k4G, k4B;
    st.deriv(r0, G, B, Fd0, k1G, k1B);
    st.deriv(rm, G + half * k1G, B + half * k1B, Fd1, k2G, k2B);
    st.deriv(rm, G + half * k2G, B + half * k2B, Fd1, k3G, k3B);
    st.deriv(r1, G + h * k3G, B + h * k3B, Fd2, k4G, k4B);
    const Cx G1 = G + h / 6.0 * (k1G + 2.0 * k2G + 2.0 * k3G + k4G);
    const Cx B1 = B + h / 6.0 * (k1B + 2.0 * k2B + 2.0 * k3B + k4B);
    if (!std::isfinite(G1.real()) || !std::isfinite(B1.real()))
      throw NumericError("field amplitudes diverged during delayed integration");

    // end-of-step F, then the half-step F from Hermite dense output
    Cx dG1, dB1;
    st.deriv(r1, G1, B1, Fd2, dG1, dB1);
    const Cx Gm = 0.5 * (G + G1) + h / 8.0 * (k1G - dG1);
    const Cx Bm = 0.5 * (B + B1) + h / 8.0 * (k1B - dB1);
    Cx A, F;
    st.outputs(rm, Gm, Bm, Fd1, A, F);
    Fh[2 * n + 1] = F;
    st.outputs(r1, G1, B1, Fd2, A, F);
    Fh[2 * n + 2] = F;
    G = G1;
    B = B1;
  }

  double t_end = h * double(N);
  Cx F_final = Fh[2 * N];
  if (rem > 0.0) {
    // last partial step: delayed samples interpolated off-lattice
    const double t = t_end;
    const Rates r0 = st.rates(t);
    const Rates rm = st.rates(t + 0.5 * rem);
    const Rates r1 = st.rates(t + rem);
    const Cx Fd0 = interp_history(Fh, half, t - delay.t_d);
    const Cx Fd1 = interp_history(Fh, half, t + 0.5 * rem - delay.t_d);
    const Cx Fd2 = interp_history(Fh, half, t + rem - delay.t_d);
    record(t, r0, Fd0);
    Cx k1G, k1B, k2G, k2B, k3G, k3B, k4G, k4B;
    st.deriv(r0, G, B, Fd0, k1G, k1B);
    st.deriv(rm, G + 0.5 * rem * k1G, B + 0.5 * rem * k1B, Fd1, k2G, k2B);
    st.deriv(rm, G + 0.5 * rem * k2G, B + 0.5 * rem * k2B, Fd1, k3G, k3B);
    st.deriv(r1, G + rem * k3G, B + rem * k3B, Fd2, k4G, k4B);
    G += rem / 6.0 * (k1G + 2.0 * k2G + 2.0 * k3G + k4G);
    B += rem / 6.0 * (k1B + 2.0 * k2B + 2.0 * k3B + k4B);
    Cx A;
    st.outputs(r1, G, B, Fd2, A, F_final);
    record(p.t_f, r1, Fd2);
    t_end = p.t_f;
  } else {
    const Rates r1 = st.rates(t_end);
    record(t_end, r1, delayed(2 * long(N) - 2 * long(m)));
  }

  // energy still in flight on the line: integral of |F|^2 over the trailing
  // window of length min(t_d, t_f), trapezoid on the half-step lattice
  double reflected = 0.0;
  {
    const double wstart = std::max(0.0, p.t_f - delay.t_d);
    std::vector<double> ts;
    std::vector<double> fs;
    const std::size_t k0 = std::size_t(std::ceil(wstart / half - 1e-12));
    if (double(k0) * half > wstart + 1e-15) {
      ts.push_back(wstart);
      fs.push_back(std::norm(interp_history(Fh, half, wstart)));
    }
    for (std::size_t k = k0; k <= 2 * N; ++k) {
      ts.push_back(double(k) * half);
      fs.push_back(std::norm(Fh[k]));
    }
    if (rem > 0.0) {
      ts.push_back(p.t_f);
      fs.push_back(std::norm(F_final));
    }
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
      reflected += 0.5 * (fs[i] + fs[i + 1]) * (ts[i + 1] - ts[i]);
  }

  TransferOutcome out;
  const double g0sq = std::norm(cfg.G0);
  out.residual_emitter = std::norm(G);
  out.received = std::norm(B);
  out.reflected = reflected;
  out.dissipated = g0sq + std::norm(cfg.B0) - out.residual_emitter - out.received - out.reflected;
  out.eta = g0sq > 0.0 ? out.received / g0sq : 0.0;
  out.phi_f = g0sq > 0.0 ? std::arg(B / cfg.G0) : std::arg(B);
  if (delay.t_d / tau_min < 0.1)
    out.warning = "t_d/tau < 0.1: direct delay simulation is unreliable in this regime";
  return {std::move(traj), out};
}

WorstCase worst_case_bound(double loss_G, double loss_F) {
  if (loss_G < 0.0 || loss_F < 0.0) throw ConfigError("losses must be non-negative");
  const double c = std::sqrt(loss_G) + std::sqrt(loss_F);
  return {c * c, 2.0 * (loss_G + loss_F)};
}

}  // namespace qxfer
