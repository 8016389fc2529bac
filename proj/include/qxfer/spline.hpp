#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qxfer/error.hpp"

namespace qxfer {

// Natural cubic spline on a uniform grid t0 + i*dt, second derivatives from
// the tridiagonal (Thomas) solve. Evaluation outside the grid returns the
// endpoint value (constant continuation).
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(double t0, double dt, std::vector<double> y)
      : t0_(t0), dt_(dt), y_(std::move(y)) {
    const std::size_t n = y_.size();
    if (n < 2 || !(dt_ > 0.0)) throw ConfigError("cubic spline needs >= 2 uniform nodes and dt > 0");
    m_.assign(n, 0.0);
    if (n == 2) return;
    // interior unknowns m[1..n-2]: m[i-1] + 4 m[i] + m[i+1] = rhs_i
    std::vector<double> cp(n, 0.0), dp(n, 0.0);
    const double s = 6.0 / (dt_ * dt_);
    cp[1] = 1.0 / 4.0;
    dp[1] = s * (y_[0] - 2.0 * y_[1] + y_[2]) / 4.0;
    for (std::size_t i = 2; i + 1 < n; ++i) {
      double denom = 4.0 - cp[i - 1];
      cp[i] = 1.0 / denom;
      dp[i] = (s * (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) - dp[i - 1]) / denom;
    }
    m_[n - 2] = dp[n - 2];
    for (std::size_t i = n - 2; i >= 2; --i) m_[i - 1] = dp[i - 1] - cp[i - 1] * m_[i];
  }

  double eval(double t) const {
    const std::size_t n = y_.size();
    double u = (t - t0_) / dt_;
    if (u <= 0.0) return y_.front();
    if (u >= double(n - 1)) return y_.back();
    std::size_t i = std::size_t(u);
    if (i > n - 2) i = n - 2;
    double a = u - double(i);
    double b = 1.0 - a;
    return b * y_[i] + a * y_[i + 1] +
           dt_ * dt_ / 6.0 * ((b * b * b - b) * m_[i] + (a * a * a - a) * m_[i + 1]);
  }

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  const std::vector<double>& values() const { return y_; }

 private:
  double t0_ = 0.0, dt_ = 1.0;
  std::vector<double> y_, m_;
};

}  // namespace qxfer
