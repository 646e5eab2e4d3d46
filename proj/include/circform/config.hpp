#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "circform/error.hpp"
#include "circform/kinematics.hpp"
#include "circform/sensing.hpp"

namespace circform {

enum class InitPolicy { kSampled, kExplicit };
enum class PacemakerPolicy { kFixed, kSeededRandom };

// Protocol constants and run controls. Angles in radians, speeds in rad/step.
// Defaults are the six-agent study configuration with K = omega0, phi = 2K.
struct SimConfig {
  int n_agents = 6;
  double omega = 0.0;
  double omega0 = 0.005;
  double k_gain = 0.005;
  double phi = 0.01;
  double theta_max = kPi / 4.0;
  long horizon = 0;  // 0 selects the automatic horizon
  std::uint64_t seed = 1;
  InitPolicy init = InitPolicy::kSampled;
  std::vector<double> explicit_phases;  // physical positions, any order
  PacemakerPolicy pacemaker_policy = PacemakerPolicy::kSeededRandom;
  int pacemaker_index = 0;  // used with kFixed
  // Actual noise amplitude is fault_noise_factor * phi. Anything above 1
  // breaks the noise bound the estimator relies on.
  double fault_noise_factor = 1.0;

  double psi() const noexcept { return kTwoPi / n_agents; }
  Speeds speeds() const noexcept { return {omega, omega0, k_gain}; }
  SensingParams sensing() const noexcept { return {theta_max, phi}; }
  // Minimum admissible initial separation.
  double min_separation() const noexcept {
    return std::min(4.0 * phi + 2.0 * omega0 + 2.0 * k_gain, theta_max);
  }

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

namespace clause {
inline constexpr const char* kAgents = "Agent count";
inline constexpr const char* kAssumption1 = "Assumption 1";
inline constexpr const char* kAssumption2 = "Assumption 2";
inline constexpr const char* kAssumption3 = "Assumption 3";
inline constexpr const char* kAssumption4 = "Assumption 4";
inline constexpr const char* kPointD = "Point (d)";
inline constexpr const char* kRunControl = "Run control";
}  // namespace clause

struct Violation {
  std::string clause;
  std::string detail;
};

struct AssumptionReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }

  bool violates(const std::string& clause_id) const {
    for (const auto& v : violations) {
      if (v.clause == clause_id) return true;
    }
    return false;
  }

  std::string to_string() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v.clause << ": " << v.detail << '\n';
    return os.str();
  }
};

namespace detail {
inline std::string num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}
}  // namespace detail

// Assumption 2 on a concrete set of initial positions.
inline void check_initial_separation(const std::vector<double>& positions, double d_min,
                                     AssumptionReport& report) {
  const std::size_t n = positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = circular_distance(positions[i], positions[j]);
      if (!(d >= d_min)) {
        report.violations.push_back(
            {clause::kAssumption2, "agents at positions " + detail::num(positions[i]) + " and " +
                                       detail::num(positions[j]) + " are " + detail::num(d) +
                                       " apart, below the minimum " + detail::num(d_min)});
        return;
      }
    }
  }
}

// Config-level checks (Assumptions 1, 3, 4 and point (d)); Assumption 2 is
// checked here too when the initial phases are given explicitly.
inline AssumptionReport validate(const SimConfig& c) {
  AssumptionReport r;
  auto fail = [&r](const char* id, std::string detail) {
    r.violations.push_back({id, std::move(detail)});
  };
  const bool finite = std::isfinite(c.omega) && std::isfinite(c.omega0) &&
                      std::isfinite(c.k_gain) && std::isfinite(c.theta_max);
  if (c.n_agents < 3) fail(clause::kAgents, "need at least 3 agents");
  if (!finite) fail(clause::kRunControl, "speeds and detecting distance must be finite");
  if (!std::isfinite(c.phi) || c.phi < 0.0) {
    fail(clause::kAssumption1, "noise bound phi must be finite and >= 0");
  }
  if (!(c.omega0 > 0.0 && c.k_gain > 0.0)) {
    fail(clause::kAssumption4, "requires omega0 > 0 and K > 0");
  }
  const double lhs = 2.0 * c.omega0 + 2.0 * c.k_gain;
  if (!(lhs < c.theta_max)) {
    fail(clause::kAssumption3, "2*omega0 + 2*K = " + detail::num(lhs) +
                                   " must be < theta_max = " + detail::num(c.theta_max));
  }
  if (c.n_agents >= 1 && !(c.theta_max > 0.0 && c.theta_max < c.psi())) {
    fail(clause::kPointD, "theta_max = " + detail::num(c.theta_max) +
                              " must lie in (0, psi) with psi = " + detail::num(c.psi()));
  }
  if (c.horizon < 0) fail(clause::kRunControl, "horizon must be >= 0");
  if (!(c.fault_noise_factor >= 0.0) || !std::isfinite(c.fault_noise_factor)) {
    fail(clause::kRunControl, "fault noise factor must be finite and >= 0");
  }
  if (c.pacemaker_policy == PacemakerPolicy::kFixed &&
      (c.pacemaker_index < 0 || c.pacemaker_index >= c.n_agents)) {
    fail(clause::kRunControl, "pacemaker index out of range");
  }
  if (c.init == InitPolicy::kExplicit) {
    if (static_cast<int>(c.explicit_phases.size()) != c.n_agents) {
      fail(clause::kRunControl, "explicit phase list must have n entries");
    } else {
      bool all_finite = true;
      for (double x : c.explicit_phases) all_finite = all_finite && std::isfinite(x);
      if (!all_finite) {
        fail(clause::kRunControl, "explicit phases must be finite");
      } else {
        std::vector<double> wrapped;
        for (double x : c.explicit_phases) wrapped.push_back(rem(x));
        check_initial_separation(wrapped, c.min_separation(), r);
      }
    }
  }
  return r;
}

inline void require_valid(const SimConfig& c) {
  const AssumptionReport r = validate(c);
  if (r.ok()) return;
  std::vector<std::string> ids;
  for (const auto& v : r.violations) ids.push_back(v.clause);
  throw InvalidConfig(std::move(ids), "invalid configuration:\n" + r.to_string());
}

}  // namespace circform
