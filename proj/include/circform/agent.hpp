#pragma once

// Per-agent decentralized stack: interval estimate of each peer's input,
// set-membership estimate of each relative phase, follower identification,
// and the three-level bang-bang controller.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "circform/error.hpp"
#include "circform/interval.hpp"
#include "circform/kinematics.hpp"
#include "circform/sensing.hpp"

namespace circform {

// Measurement sets are widened by this much before intersection so that a
// zero-width set (phi == 0) survives last-bit disagreement between the
// estimator's arithmetic and the simulated phases.
inline constexpr double kRoundingGuard = 1e-12;

struct AgentRole {
  bool is_pacemaker = false;
};

struct EstimatorBank {
  int self = 0;
  std::vector<MultiInterval> gamma;  // indexed by peer id; gamma[self] unused
  bool indicator = false;
  std::optional<int> follower;
  std::optional<long> k_identified;
  std::optional<double> theta_hat;

  static EstimatorBank initial(int self, int n_agents) {
    EstimatorBank bank;
    bank.self = self;
    bank.gamma.assign(static_cast<std::size_t>(n_agents),
                      MultiInterval(Interval(-kPi, kPi)));
    bank.gamma[static_cast<std::size_t>(self)] = MultiInterval();
    return bank;
  }

  bool tracks(int j) const noexcept {
    if (j == self) return false;
    return !indicator || follower == j;
  }
};

inline Interval estimate_peer_input(bool indicator, bool has_edge, bool is_follower,
                                    const Speeds& s) {
  if (indicator && is_follower) {
    return has_edge ? Interval(s.omega0, s.omega0 + s.k_gain) : Interval::point(s.omega0);
  }
  return Interval(0.0, s.omega0 + s.k_gain);
}

inline Interval relative_input_estimate(double u_i, const Interval& u_hat_j) {
  return Interval(u_i - u_hat_j.hi(), u_i - u_hat_j.lo());
}

struct Propagation {
  MultiInterval set;
  // A piece that did not touch the +-pi seam before the shift crossed it.
  bool wrapped = false;
};

namespace detail {

// Appends the circle image of `p` on [-pi, pi] to `out` (one or two pieces).
inline std::size_t wrap_piece(const Interval& p, Interval* out) {
  if (p.width() >= kTwoPi) {
    out[0] = Interval(-kPi, kPi);
    return 1;
  }
  if (p.lo() < -kPi) {
    if (p.hi() < -kPi) {
      out[0] = Interval(p.lo() + kTwoPi, p.hi() + kTwoPi);
      return 1;
    }
    out[0] = Interval(-kPi, p.hi());
    out[1] = Interval(p.lo() + kTwoPi, kPi);
    return 2;
  }
  if (p.hi() > kPi) {
    if (p.lo() > kPi) {
      out[0] = Interval(p.lo() - kTwoPi, p.hi() - kTwoPi);
      return 1;
    }
    out[0] = Interval(p.lo(), kPi);
    out[1] = Interval(-kPi, p.hi() - kTwoPi);
    return 2;
  }
  out[0] = p;
  return 1;
}

}  // namespace detail

// Prediction step: shift every piece by the relative-input estimate and
// re-express the result on [-pi, pi].
inline Propagation propagate_on_circle(const MultiInterval& gamma, const Interval& u_hat_ij) {
  Propagation out;
  if (gamma.is_empty() || u_hat_ij.is_empty()) return out;
  std::array<Interval, 4> buf{};
  std::size_t n = 0;
  for (const auto& p : gamma.pieces()) {
    const Interval shifted = minkowski_sum(p, u_hat_ij);
    const std::size_t added = detail::wrap_piece(shifted, buf.data() + n);
    if (added > 1 && p.lo() > -kPi && p.hi() < kPi) out.wrapped = true;
    n += added;
  }
  out.set = MultiInterval::from_pieces({buf.data(), n});
  return out;
}

inline MultiInterval propagate(const MultiInterval& gamma, const Interval& u_hat_ij) {
  return propagate_on_circle(gamma, u_hat_ij).set;
}

inline MultiInterval out_of_range_set(const SensingParams& p) {
  const Interval ic = p.out_of_range();
  return MultiInterval{negate(ic), ic};
}

// Correction step. `obs` is the measurement set when the pair is in range.
inline MultiInterval correct(const MultiInterval& gamma_prior, bool indicator,
                             bool is_follower, const std::optional<Interval>& obs,
                             const SensingParams& p) {
  if (indicator && !is_follower) return {};
  if (obs) {
    const MultiInterval candidates{negate(*obs), *obs};
    return multi_intersect(gamma_prior, candidates);
  }
  if (!indicator) return out_of_range_set(p);
  return multi_intersect(gamma_prior, out_of_range_set(p));
}

// The part of a set lying in [0, pi].
inline Interval positive_part(const MultiInterval& s) {
  const MultiInterval pos = multi_intersect(s, MultiInterval(Interval(0.0, kPi)));
  return pos.is_empty() ? Interval::empty() : hull(pos);
}

// Follower test over every tracked peer. A peer whose positive part is empty
// cannot be the follower and places no constraint on the others.
inline std::optional<int> try_identify(const EstimatorBank& bank) {
  if (bank.indicator) throw std::logic_error("try_identify: follower already latched");
  const int n = static_cast<int>(bank.gamma.size());

  std::vector<Interval> positive(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    if (j != bank.self) positive[static_cast<std::size_t>(j)] = positive_part(bank.gamma[j]);
  }

  std::optional<int> found;
  for (int j = 0; j < n; ++j) {
    if (j == bank.self || bank.gamma[j].is_empty()) continue;
    const Interval h = hull(bank.gamma[j]);
    if (!(h.lo() > 0.0)) continue;
    bool separated = true;
    for (int m = 0; m < n && separated; ++m) {
      if (m == j || m == bank.self) continue;
      const Interval& pos = positive[static_cast<std::size_t>(m)];
      if (!pos.is_empty() && !(h.hi() < pos.lo())) separated = false;
    }
    if (!separated) continue;
    if (found) {
      throw AmbiguousFollower("agent " + std::to_string(bank.self) +
                              ": peers " + std::to_string(*found) + " and " +
                              std::to_string(j) + " both qualify as closest follower");
    }
    found = j;
  }
  return found;
}

inline double scalar_estimate(const EstimatorBank& bank) {
  if (!bank.indicator || !bank.follower) {
    throw std::logic_error("scalar_estimate: no follower identified");
  }
  return hull(bank.gamma[static_cast<std::size_t>(*bank.follower)]).hi();
}

inline double control(const AgentRole& role, const EstimatorBank& bank, double psi,
                      const Speeds& s) {
  if (role.is_pacemaker) return s.omega0;
  if (bank.indicator) {
    return s.omega0 + s.k_gain * sgn_plus(psi - scalar_estimate(bank));
  }
  return 0.0;
}

// One oscillator's estimator memory plus the glue that runs the
// measure -> correct -> identify -> control -> propagate loop.
class Agent {
 public:
  Agent(int id, int n_agents, bool pacemaker)
      : role_{pacemaker},
        bank_(EstimatorBank::initial(id, n_agents)),
        in_range_(static_cast<std::size_t>(n_agents), 0) {}

  int id() const noexcept { return bank_.self; }
  const AgentRole& role() const noexcept { return role_; }
  const EstimatorBank& bank() const noexcept { return bank_; }
  double last_control() const noexcept { return u_; }

  // Correction and identification for round k. upsilon[j] holds the
  // measurement set when (self, j) is an edge. Returns true when the
  // follower was latched during this call.
  bool observe(long k, std::span<const std::optional<Interval>> upsilon,
               const SensingParams& p) {
    if (role_.is_pacemaker) return false;
    const int n = static_cast<int>(bank_.gamma.size());
    for (int j = 0; j < n; ++j) {
      in_range_[static_cast<std::size_t>(j)] = upsilon[j].has_value() ? 1 : 0;
      if (!bank_.tracks(j)) continue;
      std::optional<Interval> obs;
      if (upsilon[j]) obs = guarded(*upsilon[j], p);
      auto& g = bank_.gamma[static_cast<std::size_t>(j)];
      g = correct(g, bank_.indicator, bank_.follower == j, obs, p);
      if (g.is_empty()) {
        throw EstimatorInconsistency(
            "agent " + std::to_string(id()) + ": empty estimate set for peer " +
            std::to_string(j) + " at k=" + std::to_string(k));
      }
    }

    bool latched = false;
    if (!bank_.indicator) {
      if (const auto f = try_identify(bank_)) {
        bank_.indicator = true;
        bank_.follower = *f;
        bank_.k_identified = k;
        for (int j = 0; j < n; ++j) {
          if (j != *f) bank_.gamma[static_cast<std::size_t>(j)] = MultiInterval();
        }
        latched = true;
      }
    }
    if (bank_.indicator) bank_.theta_hat = scalar_estimate(bank_);
    return latched;
  }

  double decide(double psi, const Speeds& s) {
    u_ = control(role_, bank_, psi, s);
    return u_;
  }

  // Prediction to (k+1|k). Returns true if a piece wrapped across +-pi.
  bool predict(const Speeds& s) {
    if (role_.is_pacemaker) return false;
    bool wrapped = false;
    const int n = static_cast<int>(bank_.gamma.size());
    for (int j = 0; j < n; ++j) {
      if (!bank_.tracks(j)) continue;
      const Interval peer = estimate_peer_input(
          bank_.indicator, in_range_[static_cast<std::size_t>(j)] != 0, bank_.follower == j, s);
      auto prop = propagate_on_circle(bank_.gamma[static_cast<std::size_t>(j)],
                                      relative_input_estimate(u_, peer));
      wrapped = wrapped || prop.wrapped;
      bank_.gamma[static_cast<std::size_t>(j)] = prop.set;
    }
    return wrapped;
  }

 private:
  static Interval guarded(const Interval& ups, const SensingParams& p) {
    if (ups.is_empty()) return ups;
    return Interval(std::max(ups.lo() - kRoundingGuard, 0.0),
                    std::min(ups.hi() + kRoundingGuard, p.theta_max));
  }

  AgentRole role_;
  EstimatorBank bank_;
  std::vector<unsigned char> in_range_;
  double u_ = 0.0;
};

}  // namespace circform
