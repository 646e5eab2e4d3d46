#pragma once

// Synchronous round model: true phases, noisy proximity sensing, N agent
// stacks and the runtime oracles that watch them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "circform/agent.hpp"
#include "circform/config.hpp"
#include "circform/error.hpp"
#include "circform/interval.hpp"
#include "circform/kinematics.hpp"
#include "circform/rng.hpp"
#include "circform/sensing.hpp"

namespace circform {

// Containment slack of the runtime oracles; absorbs last-bit disagreement
// between estimator arithmetic and simulated phases.
inline constexpr double kOracleSlack = 1e-12;

enum class EventKind {
  kIdentification,
  kRangeExit,
  kDeactivation,
  kSeamWrap,
  // Everything below marks the run as failed.
  kSoundnessViolation,
  kEnclosureViolation,
  kWrongFollower,
  kOvertaking,
  kBiasViolation,
  kControlRange,
  kEstimatorInconsistency,
  kAmbiguousFollower,
  kShapeError,
};

inline bool is_diagnostic(EventKind kind) noexcept {
  return static_cast<int>(kind) >= static_cast<int>(EventKind::kSoundnessViolation);
}

inline const char* to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::kIdentification: return "identification";
    case EventKind::kRangeExit: return "range_exit";
    case EventKind::kDeactivation: return "deactivation";
    case EventKind::kSeamWrap: return "seam_wrap";
    case EventKind::kSoundnessViolation: return "soundness_violation";
    case EventKind::kEnclosureViolation: return "enclosure_violation";
    case EventKind::kWrongFollower: return "wrong_follower";
    case EventKind::kOvertaking: return "overtaking";
    case EventKind::kBiasViolation: return "bias_violation";
    case EventKind::kControlRange: return "control_range";
    case EventKind::kEstimatorInconsistency: return "estimator_inconsistency";
    case EventKind::kAmbiguousFollower: return "ambiguous_follower";
    case EventKind::kShapeError: return "shape_error";
  }
  return "unknown";
}

// Agent indices are 0-based throughout the code; index i is label i+1, so
// index 0 is the pacemaker and the true follower of index i is i-1 (mod n).
struct Event {
  EventKind kind = EventKind::kIdentification;
  long k = 0;
  int agent = 0;
  int peer = -1;
  std::string detail;
};

struct InitialCondition {
  std::vector<Phase> phases;          // by agent index
  std::vector<int> physical_index;    // agent index -> position in the sampled list
};

// Positions with every pairwise separation >= min_separation(), labeled in
// the direction of motion starting from the pacemaker.
inline InitialCondition init_phases(const SimConfig& c, RandomStream& rng) {
  const int n = c.n_agents;
  std::vector<double> pos(static_cast<std::size_t>(n));
  if (c.init == InitPolicy::kExplicit) {
    std::transform(c.explicit_phases.begin(), c.explicit_phases.end(), pos.begin(),
                   [](double x) { return rem(x); });
  } else {
    const double d_min = c.min_separation();
    const double slack = kTwoPi - n * d_min;
    if (slack < 0.0) {
      throw InfeasibleInit("n * d_min exceeds the circumference");
    }
    std::vector<double> cuts(static_cast<std::size_t>(n - 1));
    for (auto& x : cuts) x = rng.uniform01();
    std::sort(cuts.begin(), cuts.end());
    const double offset = rng.uniform(-kPi, kPi);
    double prev = 0.0;
    double along = 0.0;
    pos[0] = offset;
    for (int m = 1; m < n; ++m) {
      along += d_min + slack * (cuts[static_cast<std::size_t>(m - 1)] - prev);
      prev = cuts[static_cast<std::size_t>(m - 1)];
      pos[static_cast<std::size_t>(m)] = rem(offset + along);
    }
  }

  const int pacemaker = c.pacemaker_policy == PacemakerPolicy::kFixed
                            ? c.pacemaker_index
                            : static_cast<int>(rng.index(static_cast<std::uint64_t>(n)));

  auto ahead = [&](int m) {
    const double d = rem(pos[static_cast<std::size_t>(m)] - pos[static_cast<std::size_t>(pacemaker)]);
    return d < 0.0 ? d + kTwoPi : d;
  };
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (a == pacemaker || b == pacemaker) return a == pacemaker && b != pacemaker;
    return ahead(a) < ahead(b);
  });

  InitialCondition out;
  for (int m : order) {
    out.phases.emplace_back(pos[static_cast<std::size_t>(m)]);
    out.physical_index.push_back(m);
  }
  return out;
}

struct RoundRecord {
  long k = 0;
  std::vector<double> phases;
  std::vector<std::pair<int, int>> edges;
  std::vector<Measurement> measurements;
  std::vector<double> controls;
  std::vector<unsigned char> indicators;
  // Hull of the set tracking the agent's follower (the true follower before
  // identification); empty for the pacemaker.
  std::vector<Interval> hulls;
  std::vector<Event> events;
};

// Per-agent bookkeeping of the runtime oracles.
struct AgentTrack {
  double initial_rel = 0.0;  // vartheta_{i,i-1}(0)
  double last_rel = 0.0;
  std::optional<long> k_identified;
  std::optional<int> follower;
  std::optional<long> k_range_exit;
  std::optional<long> k_converged;
  double converged_rel = 0.0;
  double post_conv_max_dev = 0.0;  // max |vartheta(k) - vartheta(k_c)|, k >= k_c
  double post_conv_max_err = 0.0;  // max |vartheta(k) - psi|, k >= k_c
  double stasis_max_dev = 0.0;     // max |vartheta(k) - vartheta(0)|, k <= k_{i-1}
  long soundness_violations = 0;
  long bias_violations = 0;
  bool overtaken = false;
};

class World {
 public:
  World(const SimConfig& config, bool keep_trajectory)
      : config_(config),
        speeds_(config.speeds()),
        sensing_(config.sensing()),
        psi_(config.psi()),
        n_(config.n_agents),
        noise_(derive_seed(config.seed, 1)),
        keep_trajectory_(keep_trajectory) {
    require_valid(config_);
    RandomStream init_rng(derive_seed(config_.seed, 0));
    InitialCondition ic = init_phases(config_, init_rng);
    phases_ = std::move(ic.phases);
    physical_index_ = std::move(ic.physical_index);

    AssumptionReport a2;
    std::vector<double> raw;
    for (const auto& p : phases_) raw.push_back(p.value());
    check_initial_separation(raw, config_.min_separation(), a2);
    if (!a2.ok()) throw InvalidConfig({clause::kAssumption2}, a2.to_string());

    for (int i = 0; i < n_; ++i) agents_.emplace_back(i, n_, i == 0);
    tracks_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      auto& t = tracks_[static_cast<std::size_t>(i)];
      t.initial_rel = t.last_rel = rel(i);
    }
    upsilon_.assign(static_cast<std::size_t>(n_) * n_, std::nullopt);
    controls_.assign(static_cast<std::size_t>(n_), 0.0);
  }

  const SimConfig& config() const noexcept { return config_; }
  int size() const noexcept { return n_; }
  double psi() const noexcept { return psi_; }
  long k() const noexcept { return k_; }
  bool aborted() const noexcept { return aborted_; }
  std::span<const Phase> phases() const noexcept { return phases_; }
  const std::vector<int>& physical_index() const noexcept { return physical_index_; }
  const std::vector<Agent>& agents() const noexcept { return agents_; }
  const std::vector<AgentTrack>& tracks() const noexcept { return tracks_; }
  const std::vector<Event>& events() const noexcept { return events_; }
  const std::vector<RoundRecord>& trajectory() const noexcept { return trajectory_; }
  std::vector<RoundRecord> take_trajectory() { return std::move(trajectory_); }
  long seam_wraps() const noexcept { return seam_wraps_; }
  long soundness_violations() const noexcept { return soundness_violations_; }
  long enclosure_violations() const noexcept { return enclosure_violations_; }

  // vartheta_{i,i-1} at the current step; rel(0) is vartheta_{1,N}.
  double rel(int i) const {
    return relative_phase(phases_[static_cast<std::size_t>(i)],
                          phases_[static_cast<std::size_t>((i + n_ - 1) % n_)]);
  }

  bool all_converged() const {
    for (int i = 1; i < n_; ++i) {
      if (!tracks_[static_cast<std::size_t>(i)].k_converged) return false;
    }
    return true;
  }

  std::optional<long> last_convergence() const {
    std::optional<long> last;
    for (int i = 1; i < n_; ++i) {
      const auto& kc = tracks_[static_cast<std::size_t>(i)].k_converged;
      if (!kc) return std::nullopt;
      last = std::max(last.value_or(0), *kc);
    }
    return last;
  }

  // One synchronous round at step k:
  //   1. true relative phases and proximity graph from phases(k)
  //   2. noise draws (every pair, i<j order) and measurement sets
  //   3. correction, follower identification, scalar estimate
  //   4. control inputs
  //   5. input estimates and prediction to (k+1|k)
  //   6. physical update
  void step() {
    if (aborted_) return;
    const long k = k_;
    RoundRecord rec;
    round_events_.clear();

    for (int i = 0; i < n_; ++i) {
      auto& t = tracks_[static_cast<std::size_t>(i)];
      t.last_rel = rel(i);
      if (i >= 2) {
        const auto& prev = tracks_[static_cast<std::size_t>(i - 1)];
        if (!prev.k_identified) {
          t.stasis_max_dev = std::max(t.stasis_max_dev, std::abs(t.last_rel - t.initial_rel));
        }
      }
    }

    const ProximityGraph graph = build_graph(phases_, sensing_);
    sense(graph, k, rec);
    estimate(k);
    if (keep_trajectory_) {
      for (int i = 0; i < n_; ++i) {
        rec.indicators.push_back(agents_[static_cast<std::size_t>(i)].bank().indicator ? 1 : 0);
        rec.hulls.push_back(follower_hull(i));
      }
    }
    if (!aborted_) {
      act(graph, k);
      predict(k);
      for (int i = 0; i < n_; ++i) {
        phases_[static_cast<std::size_t>(i)] =
            step_phase(phases_[static_cast<std::size_t>(i)], speeds_.omega,
                       controls_[static_cast<std::size_t>(i)]);
      }
    }

    if (keep_trajectory_) {
      rec.k = k;
      rec.edges = graph.edges();
      rec.controls = controls_;
      rec.phases = round_phases_;
      rec.events = round_events_;
      trajectory_.push_back(std::move(rec));
    }
    ++k_;
  }

 private:
  void emit(EventKind kind, long k, int agent, int peer, std::string detail) {
    Event e{kind, k, agent, peer, std::move(detail)};
    if (kind == EventKind::kSeamWrap) {
      ++seam_wraps_;
    } else if (kind == EventKind::kSoundnessViolation &&
               soundness_violations_ > kMaxStoredViolations) {
      // counted only
    } else {
      events_.push_back(e);
    }
    if (keep_trajectory_) round_events_.push_back(std::move(e));
  }

  std::optional<Interval>& ups(int i, int j) {
    return upsilon_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                    static_cast<std::size_t>(j)];
  }

  void sense(const ProximityGraph& graph, long k, RoundRecord& rec) {
    round_phases_.clear();
    for (const auto& p : phases_) round_phases_.push_back(p.value());
    std::fill(upsilon_.begin(), upsilon_.end(), std::nullopt);
    const double amplitude = config_.phi * config_.fault_noise_factor;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        const double nu = sample_noise(noise_, amplitude);
        if (!graph.has_edge(i, j)) continue;
        const double alpha = angular_distance(
            relative_phase(phases_[static_cast<std::size_t>(i)], phases_[static_cast<std::size_t>(j)]));
        const double y = *measure(alpha, nu, sensing_);
        const Interval set = build_upsilon(y, sensing_);
        ups(i, j) = set;
        ups(j, i) = set;
        if (keep_trajectory_) rec.measurements.push_back({i, j, y});
        if (!set.contains(alpha, kOracleSlack)) {
          ++enclosure_violations_;
          emit(EventKind::kEnclosureViolation, k, i, j, "true distance outside measurement set");
        }
      }
    }
  }

  void estimate(long k) {
    for (int i = 1; i < n_; ++i) {
      auto& agent = agents_[static_cast<std::size_t>(i)];
      auto& t = tracks_[static_cast<std::size_t>(i)];
      bool latched = false;
      try {
        latched = agent.observe(
            k, std::span<const std::optional<Interval>>(
                   upsilon_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n_),
                   static_cast<std::size_t>(n_)),
            sensing_);
      } catch (const EstimatorInconsistency& e) {
        emit(EventKind::kEstimatorInconsistency, k, i, -1, e.what());
        aborted_ = true;
        return;
      } catch (const AmbiguousFollower& e) {
        emit(EventKind::kAmbiguousFollower, k, i, -1, e.what());
        aborted_ = true;
        return;
      } catch (const MoreThanTwoPieces& e) {
        emit(EventKind::kShapeError, k, i, -1, e.what());
        aborted_ = true;
        return;
      }
      const EstimatorBank& bank = agent.bank();
      if (latched) {
        t.k_identified = k;
        t.follower = *bank.follower;
        emit(EventKind::kIdentification, k, i, *bank.follower, "");
        if (*bank.follower != i - 1) {
          emit(EventKind::kWrongFollower, k, i, *bank.follower,
               "expected follower " + std::to_string(i - 1));
        }
      }
      for (int j = 0; j < n_; ++j) {
        if (!bank.tracks(j)) continue;
        const double truth = relative_phase(phases_[static_cast<std::size_t>(i)],
                                            phases_[static_cast<std::size_t>(j)]);
        if (!bank.gamma[static_cast<std::size_t>(j)].contains(truth, kOracleSlack)) {
          ++soundness_violations_;
          ++t.soundness_violations;
          emit(EventKind::kSoundnessViolation, k, i, j, "true relative phase outside estimate set");
        }
      }
    }
  }

  void act(const ProximityGraph& graph, long k) {
    const double push = speeds_.push();
    for (int i = 0; i < n_; ++i) {
      const double u = agents_[static_cast<std::size_t>(i)].decide(psi_, speeds_);
      controls_[static_cast<std::size_t>(i)] = u;
      if (u != 0.0 && u != speeds_.omega0 && u != push) {
        emit(EventKind::kControlRange, k, i, -1, "control outside {0, omega0, omega0+K}");
      }
    }
    for (int i = 1; i < n_; ++i) {
      const EstimatorBank& bank = agents_[static_cast<std::size_t>(i)].bank();
      auto& t = tracks_[static_cast<std::size_t>(i)];
      if (!bank.indicator) continue;
      const double theta_hat = *bank.theta_hat;
      const double u = controls_[static_cast<std::size_t>(i)];

      if (!t.k_range_exit && !graph.has_edge(i, *bank.follower)) {
        t.k_range_exit = k;
        emit(EventKind::kRangeExit, k, i, *bank.follower, "");
      }
      if (!t.k_converged && theta_hat > psi_) {
        t.k_converged = k;
        t.converged_rel = t.last_rel;
        emit(EventKind::kDeactivation, k, i, *bank.follower, "");
      }
      if (t.k_converged) {
        t.post_conv_max_dev =
            std::max(t.post_conv_max_dev, std::abs(t.last_rel - t.converged_rel));
        t.post_conv_max_err = std::max(t.post_conv_max_err, std::abs(t.last_rel - psi_));
      }
      if (*bank.follower == i - 1) {
        if (!t.overtaken && t.last_rel < 0.0) {
          t.overtaken = true;
          emit(EventKind::kOvertaking, k, i, i - 1, "relative phase to follower turned negative");
        }
        if (t.k_range_exit && u == speeds_.push()) {
          const double bias = theta_hat - t.last_rel;
          if (bias < -kOracleSlack || bias >= speeds_.k_gain + kOracleSlack) {
            ++t.bias_violations;
            emit(EventKind::kBiasViolation, k, i, i - 1, "estimate bias outside [0, K)");
          }
        }
      }
    }
  }

  void predict(long k) {
    for (int i = 1; i < n_; ++i) {
      try {
        if (agents_[static_cast<std::size_t>(i)].predict(speeds_)) {
          emit(EventKind::kSeamWrap, k, i, -1, "");
        }
      } catch (const MoreThanTwoPieces& e) {
        emit(EventKind::kShapeError, k, i, -1, e.what());
        aborted_ = true;
        return;
      }
    }
  }

  Interval follower_hull(int i) const {
    if (i == 0) return Interval::empty();
    const EstimatorBank& bank = agents_[static_cast<std::size_t>(i)].bank();
    const int j = bank.follower.value_or(i - 1);
    const auto& g = bank.gamma[static_cast<std::size_t>(j)];
    return g.is_empty() ? Interval::empty() : hull(g);
  }

  static constexpr long kMaxStoredViolations = 20;

  SimConfig config_;
  Speeds speeds_;
  SensingParams sensing_;
  double psi_;
  int n_;
  RandomStream noise_;
  bool keep_trajectory_;
  long k_ = 0;
  bool aborted_ = false;

  std::vector<Phase> phases_;
  std::vector<int> physical_index_;
  std::vector<Agent> agents_;
  std::vector<AgentTrack> tracks_;
  std::vector<Event> events_;
  std::vector<Event> round_events_;
  std::vector<RoundRecord> trajectory_;
  std::vector<std::optional<Interval>> upsilon_;
  std::vector<double> controls_;
  std::vector<double> round_phases_;
  long seam_wraps_ = 0;
  long soundness_violations_ = 0;
  long enclosure_violations_ = 0;
};

inline void step(World& world) { world.step(); }

}  // namespace circform
