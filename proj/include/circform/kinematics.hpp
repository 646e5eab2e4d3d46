#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace circform {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reduces x to r in [-pi, pi) with x = 2*pi*q + r. Values already in range
// are returned unchanged, so rem is exactly idempotent.
inline double rem(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rem: non-finite argument");
  if (x >= -kPi && x < kPi) return x;
  double r = std::fmod(x, kTwoPi);  // exact, |r| < 2*pi
  if (r >= kPi) {
    r -= kTwoPi;
  } else if (r < -kPi) {
    r += kTwoPi;
  }
  return r;
}

inline int sgn_plus(double x) noexcept { return x >= 0.0 ? 1 : 0; }

// Angular position on the circle, always normalized to [-pi, pi).
class Phase {
 public:
  constexpr Phase() = default;
  explicit Phase(double radians) : value_(rem(radians)) {}

  double value() const noexcept { return value_; }

  friend bool operator==(const Phase&, const Phase&) = default;

 private:
  double value_ = 0.0;
};

// Natural speed, pacemaker speed and control gain, all in rad/step.
struct Speeds {
  double omega = 0.0;
  double omega0 = 0.0;
  double k_gain = 0.0;

  double push() const noexcept { return omega0 + k_gain; }
};

inline Phase step_phase(Phase theta, double omega, double u) {
  return Phase(theta.value() + omega + u);
}

inline double relative_phase(Phase theta_i, Phase theta_j) {
  return rem(theta_i.value() - theta_j.value());
}

// Shortest distance between two points on the circle, in [0, pi].
inline double circular_distance(double a, double b) { return std::abs(rem(a - b)); }

}  // namespace circform
