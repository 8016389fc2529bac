#include "qxfer/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "qxfer/error.hpp"

namespace qxfer {

namespace {

struct Env {
  double kappa_e, kappa_r;
  Cx ue, ur;  // unit phases of the two amplitudes
  double dw_e, dw_r;
};

struct Stepper {
  const SimConfig& cfg;
  bool sampled;
  double sqrt_eta_tl;
  double gamma_e, gamma_r;  // 1/T1 contributions

  explicit Stepper(const SimConfig& c) : cfg(c) {
    sampled = cfg.shapes.has_value();
    sqrt_eta_tl = std::sqrt(cfg.eta_tl);
    gamma_e = std::isinf(cfg.T1_e) ? 0.0 : 1.0 / cfg.T1_e;
    gamma_r = std::isinf(cfg.T1_r) ? 0.0 : 1.0 / cfg.T1_r;
  }

  Env env(double t) const {
    Cx te, tr;
    if (sampled) {
      te = cfg.shapes->e.eval(t);
      tr = cfg.shapes->r.eval(t);
    } else {
      PulsePair pp = eval_ideal_clamped(cfg.design, t);
      te = pp.te;
      tr = pp.tr;
    }
    Env e;
    const double ae = std::abs(te), ar = std::abs(tr);
    e.kappa_e = ae * ae / cfg.design.tau_rt_e;
    e.kappa_r = ar * ar / cfg.design.tau_rt_r;
    e.ue = ae > 0.0 ? te / ae : Cx(1.0, 0.0);
    e.ur = ar > 0.0 ? tr / ar : Cx(1.0, 0.0);
    e.dw_e = cfg.delta_omega_e_const + (cfg.delta_omega_e ? cfg.delta_omega_e->eval(t) : 0.0);
    e.dw_r = cfg.delta_omega_r_const + (cfg.delta_omega_r ? cfg.delta_omega_r->eval(t) : 0.0);
    return e;
  }

  void deriv(const Env& e, Cx G, Cx B, Cx& dG, Cx& dB) const {
    const Cx A = sqrt_eta_tl * e.ue * std::sqrt(e.kappa_e) * G;
    dG = (Cx(0.0, -e.dw_e) -
          Cx(0.5 * (e.kappa_e * cfg.leak_scale_e + cfg.leak_offset_e + gamma_e), 0.0)) *
         G;
    dB = (Cx(0.0, -e.dw_r) -
          Cx(0.5 * (e.kappa_r * cfg.leak_scale_r + cfg.leak_offset_r + gamma_r), 0.0)) *
             B +
         e.ur * std::sqrt(e.kappa_r) * A;
  }

  void outputs(const Env& e, Cx G, Cx B, Cx& A, Cx& F) const {
    A = sqrt_eta_tl * e.ue * std::sqrt(e.kappa_e) * G;
    F = A - std::conj(e.ur) * std::sqrt(e.kappa_r) * B;
  }
};

}  // namespace

std::pair<FieldTrajectory, TransferOutcome> simulate(const SimConfig& cfg) {
  const ProtocolParams& p = cfg.design;
  if (!(p.t_f > 0.0) || !(p.tau_rt_e > 0.0) || !(p.tau_rt_r > 0.0) || !(p.tau_e > 0.0) ||
      !(p.tau_r > 0.0))
    throw ConfigError("protocol parameters incomplete (non-positive times)");
  if (!(cfg.eta_tl > 0.0) || cfg.eta_tl > 1.0) throw ConfigError("eta_tl must lie in (0, 1]");
  if (!(cfg.T1_e > 0.0) || !(cfg.T1_r > 0.0)) throw ConfigError("T1 must be positive (or +inf)");
  if (cfg.shapes) {
    for (const SampledShape* s : {&cfg.shapes->e, &cfg.shapes->r})
      for (const Cx& v : s->v)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw ConfigError("NaN in sampled pulse shapes");
  }
  const double tau_min = std::min(p.tau_e, p.tau_r);
  const double dt_req = cfg.dt_int > 0.0 ? cfg.dt_int : tau_min / 1000.0;
  if (dt_req > tau_min / 100.0)
    throw ConfigError("integration step larger than tau_min/100 rejected (accuracy guard)");

  // split exactly at the pulse kinks so they never fall inside a step
  std::vector<double> brk = {0.0, p.t_f};
  if (!cfg.shapes) {
    for (double tm : {p.t_m_e, p.t_m_r})
      if (tm > 0.0 && tm < p.t_f) brk.push_back(tm);
  }
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end()), brk.end());

  Stepper st(cfg);
  FieldTrajectory traj;
  Cx G = cfg.G0, B = cfg.B0;
  double reflected = 0.0;

  auto record = [&](double t, const Env& e) {
    Cx A, F;
    st.outputs(e, G, B, A, F);
    if (cfg.record_trajectory) {
      traj.t.push_back(t);
      traj.G.push_back(G);
      traj.B.push_back(B);
      traj.A.push_back(A);
      traj.F.push_back(F);
    }
    return F;
  };

  for (std::size_t seg = 0; seg + 1 < brk.size(); ++seg) {
    const double a = brk[seg], b = brk[seg + 1];
    std::size_t n = std::size_t(std::ceil((b - a) / dt_req));
    n = std::max<std::size_t>(n + (n % 2), 2);  // even step count for Simpson
    const double h = (b - a) / double(n);
    double fsq_acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = a + h * double(i);
      const Env e0 = st.env(t);
      if (seg == 0 || i > 0) {
        const Cx F = record(t, e0);
        const double fsq = std::norm(F);
        // composite Simpson weights 1,4,2,...,4,1
        double wq = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        fsq_acc += wq * fsq;
      } else {
        // segment boundary already recorded; still need its Simpson term
        Cx A, F;
        st.outputs(e0, G, B, A, F);
        fsq_acc += std::norm(F);
      }
      if (i == n) break;
      // classical RK4 step
      Cx k1G, k1B, k2G, k2B, k3G, k3B, k4G, k4B;
      const Env em = st.env(t + 0.5 * h);
      const Env e1 = st.env(t + h);
      st.deriv(e0, G, B, k1G, k1B);
      st.deriv(em, G + 0.5 * h * k1G, B + 0.5 * h * k1B, k2G, k2B);
      st.deriv(em, G + 0.5 * h * k2G, B + 0.5 * h * k2B, k3G, k3B);
      st.deriv(e1, G + h * k3G, B + h * k3B, k4G, k4B);
      G += h / 6.0 * (k1G + 2.0 * k2G + 2.0 * k3G + k4G);
      B += h / 6.0 * (k1B + 2.0 * k2B + 2.0 * k3B + k4B);
      if (!std::isfinite(G.real()) || !std::isfinite(B.real()))
        throw NumericError("field amplitudes diverged during integration");
    }
    reflected += fsq_acc * h / 3.0;
  }

  TransferOutcome out;
  const double g0sq = std::norm(cfg.G0);
  out.residual_emitter = std::norm(G);
  out.received = std::norm(B);
  out.reflected = reflected;
  out.dissipated = g0sq + std::norm(cfg.B0) - out.residual_emitter - out.received - out.reflected;
  out.eta = g0sq > 0.0 ? out.received / g0sq : 0.0;
  out.phi_f = g0sq > 0.0 ? std::arg(B / cfg.G0) : std::arg(B);
  return {std::move(traj), out};
}

InefficiencyPrediction analytic_inefficiency(double tau_e, double tau_r, double t_m, double t_f) {
  if (!(tau_e > 0.0) || !(tau_r > 0.0) || !(t_m > 0.0) || !(t_f > t_m))
    throw ConfigError("analytic inefficiency needs 0 < t_m < t_f and positive taus");
  InefficiencyPrediction p;
  p.two_term =
      (tau_r * std::exp(-t_m / tau_r) + tau_e * std::exp(-(t_f - t_m) / tau_e)) / (tau_e + tau_r);
  p.optimized = std::exp(-t_f / (tau_e + tau_r));
  return p;
}

double dissipation_scaling(double eta_design, double eta_tl, double T1_e, double T1_r,
                           double t_f) {
  if (!(eta_design > 0.0) || eta_design >= 1.0 || !(eta_tl > 0.0) || eta_tl > 1.0 ||
      !(T1_e > 0.0) || !(T1_r > 0.0) || !(t_f > 0.0))
    throw ConfigError("invalid dissipation parameters");
  double f = eta_design * eta_tl;
  if (!std::isinf(T1_e)) f *= std::exp(-t_f / (2.0 * T1_e));
  if (!std::isinf(T1_r)) f *= std::exp(-t_f / (2.0 * T1_r));
  return f;
}

double detuning_coefficient(double eta_design) {
  if (!(eta_design > 0.0) || !(eta_design < 1.0)) throw ConfigError("eta_design must lie in (0,1)");
  const double L = std::log1p(-eta_design);  // ln(1-eta)
  return 2.0 - (1.0 - eta_design) * (2.0 - 2.0 * L + L * L);
}

}  // namespace qxfer
