#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qxfer/coupler.hpp"
#include "qxfer/dynamics.hpp"

using namespace qxfer;

namespace {

CouplerParams ref_params() {
  CouplerParams cp;
  cp.omega0 = 2.0 * M_PI * 6.0;
  return cp;
}

}  // namespace

TEST_CASE("reference circuit constants at zero coupling") {
  auto cp = ref_params();
  auto p0 = amplitudes(cp, 0.0);
  CHECK(std::abs(p0.b) == doctest::Approx(0.0657).epsilon(2e-3));
  CHECK(std::arg(p0.b) == doctest::Approx(-M_PI / 2.0).epsilon(1e-3));  // nearly pure imaginary
  CHECK(std::abs(p0.t) == 0.0);
  // reflection is near -1 with a small phase rotation
  CHECK(std::abs(p0.r_in) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(M_PI - std::fabs(std::arg(p0.r_in)) == doctest::Approx(0.1313).epsilon(2e-3));
  CHECK(p0.delta_omega == 0.0);
}

TEST_CASE("small-coupling transmission slope") {
  auto cp = ref_params();
  auto pt = amplitudes(cp, 2.0);
  CHECK(std::abs(pt.t) / (2.0 / cp.Mg) == doctest::Approx(0.0339).epsilon(0.02));
}

TEST_CASE("scattering unitarity and the outgoing reflection convention") {
  auto cp = ref_params();
  for (double M : {50.0, 306.2, 900.0}) {
    auto pt = amplitudes(cp, M);
    CHECK(std::norm(pt.r_in) + std::norm(pt.t) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(pt.r_out) == doctest::Approx(std::abs(pt.r_in)).epsilon(1e-12));
    // unitarity phase constraint: r_in* t + t* r_out = 0 for the effective matrix
    Cx cross = std::conj(pt.r_in) * pt.t + std::conj(pt.t) * pt.r_out;
    CHECK(std::abs(cross) < 1e-12);
  }
}

TEST_CASE("coupling inversion: round trip and reference values") {
  auto cp = ref_params();
  double M05 = invert_M(cp, 0.05);
  CHECK(M05 == doctest::Approx(306.2).epsilon(1e-3));
  CHECK(std::abs(amplitudes(cp, M05).t) == doctest::Approx(0.05).epsilon(1e-9));
  double M10 = invert_M(cp, 0.1);
  CHECK(M10 == doctest::Approx(1254.4).epsilon(1e-3));
  for (double target : {0.001, 0.02, 0.12}) {
    double M = invert_M(cp, target);
    CHECK(std::abs(amplitudes(cp, M).t) == doctest::Approx(target).epsilon(1e-9));
  }
  CHECK(invert_M(cp, 0.0) == 0.0);
  CHECK_THROWS_AS(invert_M(cp, 0.5), ConfigError);  // beyond the monotone branch
}

TEST_CASE("frequency pull at the working point") {
  auto cp = ref_params();
  double M05 = invert_M(cp, 0.05);
  double dw = detuning(cp, M05);
  CHECK(dw * 1e3 / (2.0 * M_PI) == doctest::Approx(-18.57).epsilon(3e-3));  // MHz
  // strongly sublinear in M: the exact pull is ~0.67 of the small-M slope times M
  double slope_M = detuning(cp, 1.0) / 1.0;
  CHECK(dw / (slope_M * M05) == doctest::Approx(0.669).epsilon(0.01));
}

TEST_CASE("linearized detuning slope against finite differences") {
  auto cp = ref_params();
  double sl = detuning_linear(cp).slope;
  CHECK(sl == doctest::Approx(-2.3512).epsilon(1e-3));  // rad/ns per unit |t|
  double t_small = 0.001;
  double fd = detuning(cp, invert_M(cp, t_small)) / t_small;
  CHECK(sl == doctest::Approx(fd).epsilon(1e-4));
  // the pull is nearly linear in |t| (unlike in M): 3.2% deviation at |t| = 0.1
  double dev = std::fabs(detuning(cp, invert_M(cp, 0.1)) / (sl * 0.1) - 1.0);
  CHECK(dev == doctest::Approx(0.032).epsilon(0.35));
}

TEST_CASE("refined detuning approximation beats the linear-in-M slope") {
  auto cp = ref_params();
  double slope_M = detuning(cp, 1.0) / 1.0;
  for (double tgt : {0.05, 0.08, 0.1}) {
    double M = invert_M(cp, tgt);
    double exact = detuning(cp, M);
    double refined = detuning_refined(cp, M);
    double linear = slope_M * M;
    CHECK(std::fabs(refined - exact) < std::fabs(linear - exact));
  }
  // both agree with the exact pull as M -> 0
  CHECK(detuning_refined(cp, 0.5) == doctest::Approx(detuning(cp, 0.5)).epsilon(1e-3));
}

TEST_CASE("effective tap inductance") {
  // L_e = (R/omega) tan(2 pi d/lambda)
  CHECK(effective_inductance(80.0, 2.0 * M_PI * 6.0, 0.013) == doctest::Approx(173.72).epsilon(1e-3));
  // the commonly quoted rounded value 180 pH is within 5%
  CHECK(effective_inductance(80.0, 2.0 * M_PI * 6.0, 0.013) == doctest::Approx(180.0).epsilon(0.05));
  CHECK_THROWS_AS(effective_inductance(80.0, 2.0 * M_PI * 6.0, 0.25), ConfigError);
  CHECK_THROWS_AS(effective_inductance(80.0, 2.0 * M_PI * 6.0, 0.0), ConfigError);
}

TEST_CASE("SQUID flux-to-inductance map") {
  // Phi0/2pi = 329.106 pH uA; at zero flux L_J = that over Ic1 + Ic2
  CHECK(flux_to_LJ(1.0, 1.0, 0.0) == doctest::Approx(329.106 / 2.0).epsilon(1e-4));
  CHECK(flux_to_LJ(0.5, 1.5, 0.0) == doctest::Approx(329.106 / 2.0).epsilon(1e-4));
  // monotone growth toward half frustration
  CHECK(flux_to_LJ(1.0, 1.0, 0.2) > flux_to_LJ(1.0, 1.0, 0.1));
  CHECK(flux_to_LJ(1.0, 1.0, 0.49) > 10.0 * flux_to_LJ(1.0, 1.0, 0.0));
  // periodicity
  CHECK(flux_to_LJ(1.0, 1.0, 1.1) == doctest::Approx(flux_to_LJ(1.0, 1.0, 0.1)).epsilon(1e-12));
  // symmetric SQUID is singular exactly at half frustration
  CHECK_THROWS_AS(flux_to_LJ(1.0, 1.0, 0.5), NumericError);
  // an asymmetric SQUID stays finite there
  CHECK(flux_to_LJ(0.8, 1.2, 0.5) == doctest::Approx(329.106 / 0.4).epsilon(1e-4));
  CHECK_THROWS_AS(flux_to_LJ(0.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("control schedule reproduces the pulse and compensation levels") {
  auto cp = ref_params();
  auto p = design_protocol({0.05, 0.0}, {0.05, 0.0}, round_trip_time_ns(6.0), 0.99);
  const std::size_t n = 256;
  std::vector<double> abs_t(n + 1);
  const double dt = p.t_f / double(n);
  for (std::size_t i = 0; i <= n; ++i) abs_t[i] = std::abs(eval_ideal_clamped(p, dt * i).te);

  auto s0 = schedule(cp, abs_t, 0.0, dt, 0.0);
  auto s1 = schedule(cp, abs_t, 0.0, dt, 1.0);
  auto sh = schedule(cp, abs_t, 0.0, dt, 0.5);
  REQUIRE(s0.M.size() == n + 1);
  for (std::size_t i = 0; i <= n; i += 37) {
    CHECK(std::abs(s0.t.v[i]) == doctest::Approx(abs_t[i]).epsilon(1e-9));
    CHECK(s0.delta_omega.v[i] == doctest::Approx(detuning(cp, s0.M[i])).epsilon(1e-12));
    CHECK(s1.delta_omega.v[i] == 0.0);
    CHECK(sh.delta_omega.v[i] == doctest::Approx(0.5 * s0.delta_omega.v[i]).epsilon(1e-12));
  }
  // the transmission phase varies along the pulse
  CHECK(std::fabs(std::arg(s0.t.v[n]) - std::arg(s0.t.v[n / 8])) > 1e-3);
  CHECK_THROWS_AS(schedule(cp, abs_t, 0.0, dt, -0.1), ConfigError);
  CHECK_THROWS_AS(schedule(cp, abs_t, 0.0, dt, 1.1), ConfigError);
}

TEST_CASE("uncompensated frequency pull wrecks the transfer; compensation restores it") {
  auto cp = ref_params();
  auto p = design_protocol({0.05, 0.0}, {0.05, 0.0}, round_trip_time_ns(6.0), 0.999);
  auto run_c = [&](double comp) {
    auto cs = apply_coupler(p, cp, comp);
    SimConfig sc;
    sc.design = p;
    sc.record_trajectory = false;
    sc.shapes = cs.shapes;
    sc.delta_omega_e = cs.dw_e;
    sc.delta_omega_r = cs.dw_r;
    return simulate(sc).second.eta;
  };
  double e0 = run_c(0.0);
  double e1 = run_c(1.0);
  CHECK(e0 == doctest::Approx(0.325).epsilon(0.01));  // frozen reference value
  CHECK(e1 > 0.9975);
  CHECK(run_c(0.95) > 0.98);
}

TEST_CASE("circuit validation") {
  CouplerParams bad = ref_params();
  bad.Le = 3000.0;  // omega Le exceeds the resonator impedance
  CHECK_THROWS_AS(amplitudes(bad, 100.0), ConfigError);
  CouplerParams zero = ref_params();
  zero.omega0 = 0.0;
  CHECK_THROWS_AS(amplitudes(zero, 100.0), ConfigError);
}
