#pragma once

// Closed-form convergence-time bounds and the trajectory-based convergence
// detector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "circform/config.hpp"
#include "circform/error.hpp"
#include "circform/kinematics.hpp"
#include "circform/sim.hpp"

namespace circform {

// Distance the follower must still cover, measured in the direction of
// motion: vartheta itself when positive, 2*pi + vartheta otherwise.
inline double forward_gap(double vartheta) noexcept {
  return vartheta > 0.0 ? vartheta : kTwoPi + vartheta;
}

// Identification-time bound for agent 2.
inline long identification_bound(double theta21_0, double omega0, double k_gain) {
  return static_cast<long>(
      std::ceil((forward_gap(theta21_0) - 2.0 * (omega0 + k_gain)) / omega0));
}

// Steps between the agent-2 identification bound and its convergence bound.
inline long push_increment(double theta_max, double psi, double omega0, double k_gain) {
  return static_cast<long>(std::floor((theta_max - (omega0 + k_gain)) / k_gain)) + 1 +
         static_cast<long>(std::ceil((psi - (theta_max + k_gain)) / k_gain));
}

// Convergence-time bound for agent i >= 3 given its follower's observed
// identification and convergence times.
inline long cascade_bound(double theta_i_0, long k_follower_id, long k_follower_conv,
                          double psi, double omega0, double k_gain) {
  const double two_push = 2.0 * (omega0 + k_gain);
  const long reach =
      k_follower_id + static_cast<long>(std::ceil((forward_gap(theta_i_0) - two_push) / omega0));
  return std::max(reach, k_follower_conv) +
         static_cast<long>(std::ceil((psi - two_push) / k_gain));
}

struct TheoremBounds {
  long t1 = 0;
  long t2 = 0;
  // Indexed by agent index; present for indices >= 2 whose follower has
  // both identified and converged.
  std::vector<std::optional<long>> t4;
};

// initial_rel[i] = vartheta_{i,i-1}(0); k_id / k_conv are observed times by
// agent index.
inline TheoremBounds theorem_bounds(const SimConfig& c, std::span<const double> initial_rel,
                                    std::span<const std::optional<long>> k_id,
                                    std::span<const std::optional<long>> k_conv) {
  TheoremBounds b;
  const double psi = c.psi();
  b.t1 = identification_bound(initial_rel[1], c.omega0, c.k_gain);
  b.t2 = b.t1 + push_increment(c.theta_max, psi, c.omega0, c.k_gain);
  b.t4.assign(initial_rel.size(), std::nullopt);
  for (std::size_t i = 2; i < initial_rel.size(); ++i) {
    if (k_id[i - 1] && k_conv[i - 1]) {
      b.t4[i] = cascade_bound(initial_rel[i], *k_id[i - 1], *k_conv[i - 1], psi, c.omega0,
                              c.k_gain);
    }
  }
  return b;
}

// Run length that comfortably covers the worst admissible initial condition.
inline long default_horizon(const SimConfig& c) {
  const double psi = c.psi();
  const long reach = identification_bound(-1e-9, c.omega0, c.k_gain);
  const long t2 = std::max(0L, reach) +
                  std::max(0L, push_increment(c.theta_max, psi, c.omega0, c.k_gain));
  const long increment =
      std::max(0L, reach) +
      std::max(0L, static_cast<long>(std::ceil((psi - 2.0 * (c.omega0 + c.k_gain)) / c.k_gain)));
  return 4 * t2 + static_cast<long>(c.n_agents) * increment;
}

struct ConvergenceResult {
  int agent = 0;
  long k_converged = 0;
  double steady_error = 0.0;
  double max_deviation = 0.0;  // variation of vartheta_{i,i-1} after k_converged
};

inline constexpr double kConstancyTolerance = 1e-12;

// Recovers each non-pacemaker's deactivation step from recorded indicators
// and hulls, and its steady error at the last record. Throws NotConverged if
// an agent never deactivates, or if its spacing drifts after deactivating.
inline std::vector<ConvergenceResult> detect_convergence(std::span<const RoundRecord> trajectory,
                                                         double psi) {
  if (trajectory.empty()) throw NotConverged("empty trajectory");
  const int n = static_cast<int>(trajectory.front().phases.size());
  auto rel = [n](const RoundRecord& r, int i) {
    return rem(r.phases[static_cast<std::size_t>(i)] -
               r.phases[static_cast<std::size_t>((i + n - 1) % n)]);
  };

  std::vector<ConvergenceResult> out;
  for (int i = 1; i < n; ++i) {
    std::optional<std::size_t> at;
    for (std::size_t r = 0; r < trajectory.size(); ++r) {
      const auto& rec = trajectory[r];
      const Interval& h = rec.hulls[static_cast<std::size_t>(i)];
      if (rec.indicators[static_cast<std::size_t>(i)] && !h.is_empty() && h.hi() > psi) {
        at = r;
        break;
      }
    }
    if (!at) throw NotConverged("agent index " + std::to_string(i) + " never deactivated");
    const double ref = rel(trajectory[*at], i);
    double dev = 0.0;
    for (std::size_t r = *at; r < trajectory.size(); ++r) {
      dev = std::max(dev, std::abs(rel(trajectory[r], i) - ref));
    }
    if (dev > kConstancyTolerance) {
      throw NotConverged("agent index " + std::to_string(i) + " spacing drifts after deactivation");
    }
    out.push_back({i, trajectory[*at].k, std::abs(rel(trajectory.back(), i) - psi), dev});
  }
  return out;
}

}  // namespace circform
