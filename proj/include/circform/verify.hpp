#pragma once

// Randomized assertion battery: runs many assumption-satisfying configs and
// tallies every runtime oracle and theorem check.

#include <array>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "circform/config.hpp"
#include "circform/monte_carlo.hpp"
#include "circform/rng.hpp"
#include "circform/run.hpp"

namespace circform {

struct VerifyOptions {
  int runs = 100;
  int n_min = 3;
  int n_max = 8;
  std::uint64_t seed = 1;
  // Noise is drawn with amplitude fault_factor * phi while the estimator
  // still assumes phi.
  bool inject_fault = false;
  double fault_factor = 3.0;
  unsigned threads = 0;
};

enum class Check {
  kSoundness,
  kTheorem1,
  kTheorem2,
  kTheorem3,
  kTheorem4,
  kConvergence,
  kCascadeOrder,
  kStasis,
  kBias,
  kPremises,
  kControlRange,
};

inline constexpr std::array<Check, 11> kAllChecks{
    Check::kSoundness,    Check::kTheorem1, Check::kTheorem2,     Check::kTheorem3,
    Check::kTheorem4,     Check::kConvergence, Check::kCascadeOrder, Check::kStasis,
    Check::kBias,         Check::kPremises, Check::kControlRange};

inline const char* to_string(Check c) noexcept {
  switch (c) {
    case Check::kSoundness: return "soundness";
    case Check::kTheorem1: return "theorem1";
    case Check::kTheorem2: return "theorem2";
    case Check::kTheorem3: return "theorem3";
    case Check::kTheorem4: return "theorem4";
    case Check::kConvergence: return "convergence";
    case Check::kCascadeOrder: return "cascade_order";
    case Check::kStasis: return "stasis";
    case Check::kBias: return "bias";
    case Check::kPremises: return "premises";
    case Check::kControlRange: return "control_range";
  }
  return "unknown";
}

// Runtime oracles (as opposed to theorem statements).
inline bool is_diagnostic_check(Check c) noexcept {
  return c == Check::kSoundness || c == Check::kPremises || c == Check::kControlRange;
}

struct CheckTally {
  long checked = 0;
  long failed = 0;
};

struct VerifyReport {
  long runs = 0;
  std::array<CheckTally, kAllChecks.size()> tallies{};
  std::vector<std::string> failures;  // first few, for the log

  CheckTally& at(Check c) { return tallies[static_cast<std::size_t>(c)]; }
  const CheckTally& at(Check c) const { return tallies[static_cast<std::size_t>(c)]; }

  long violations() const noexcept {
    long v = 0;
    for (const auto& t : tallies) v += t.failed;
    return v;
  }
  bool ok() const noexcept { return violations() == 0; }

  bool has_diagnostic_failure() const {
    for (Check c : kAllChecks) {
      if (is_diagnostic_check(c) && at(c).failed > 0) return true;
    }
    return false;
  }
};

// A config inside Assumptions 1, 3, 4 and point (d); Assumption 2 is met by
// the initial-condition sampler.
inline SimConfig sample_config(RandomStream& rng, int n_min, int n_max) {
  SimConfig c;
  c.n_agents = n_min + static_cast<int>(rng.index(static_cast<std::uint64_t>(n_max - n_min + 1)));
  c.theta_max = c.psi() * rng.uniform(0.5, 0.9);
  c.omega0 = rng.uniform(0.003, 0.01);
  c.k_gain = rng.uniform(0.5, 4.0) * c.omega0;
  c.phi = rng.uniform(0.0, 5.0) * c.k_gain;
  c.omega = rng.uniform01() < 0.5 ? 0.0 : rng.uniform(-0.05, 0.05);
  c.seed = rng.bits();
  return c;
}

namespace detail {

inline bool premises_hold(const RunSummary& s) {
  for (const auto& e : s.diagnostics) {
    switch (e.kind) {
      case EventKind::kSoundnessViolation:
      case EventKind::kEstimatorInconsistency:
      case EventKind::kControlRange:
      case EventKind::kBiasViolation:
        break;
      default:
        return false;
    }
  }
  return true;
}

inline bool has_event(const RunSummary& s, EventKind kind) {
  for (const auto& e : s.diagnostics) {
    if (e.kind == kind) return true;
  }
  return false;
}

}  // namespace detail

inline void tally(const RunSummary& s, VerifyReport& r) {
  auto record = [&](Check c, bool pass) {
    auto& t = r.at(c);
    ++t.checked;
    if (!pass) {
      ++t.failed;
      if (r.failures.size() < 20) {
        std::ostringstream os;
        os << to_string(c) << " failed: N=" << s.config.n_agents << " seed=" << s.seed
           << " status=" << to_string(s.status);
        if (!s.diagnostics.empty()) os << " (" << s.diagnostics.front().detail << ")";
        r.failures.push_back(os.str());
      }
    }
  };
  ++r.runs;
  // An emptied estimate set cannot contain the truth either.
  record(Check::kSoundness, s.soundness_violations == 0 &&
                                !detail::has_event(s, EventKind::kEstimatorInconsistency));
  record(Check::kPremises, detail::premises_hold(s));
  record(Check::kControlRange, !detail::has_event(s, EventKind::kControlRange));
  record(Check::kConvergence, s.status != RunStatus::kNotConverged && s.last_convergence());
  record(Check::kTheorem1, s.t1.pass);
  record(Check::kTheorem2, s.t2.pass && s.t2_band_pass);
  record(Check::kTheorem3, s.t3_pass);
  record(Check::kTheorem4, s.t4_pass);
  record(Check::kCascadeOrder, s.cascade_ordered);
  record(Check::kStasis, s.stasis_pass);
  record(Check::kBias, s.bias_violations == 0);
}

inline VerifyReport verify(const VerifyOptions& o) {
  if (o.runs < 1 || o.n_min < 3 || o.n_max < o.n_min) {
    throw InvalidConfig({clause::kRunControl}, "verify needs runs >= 1 and 3 <= n-min <= n-max");
  }
  RandomStream sampler(derive_seed(o.seed, 0x5eed));
  std::vector<SimConfig> configs;
  for (int r = 0; r < o.runs; ++r) {
    SimConfig c = sample_config(sampler, o.n_min, o.n_max);
    if (o.inject_fault) c.fault_noise_factor = o.fault_factor;
    configs.push_back(c);
  }

  std::vector<RunSummary> summaries(configs.size());
  parallel_for(configs.size(), o.threads,
               [&](std::size_t i) { summaries[i] = run(configs[i], false).summary; });

  VerifyReport report;
  for (const auto& s : summaries) tally(s, report);
  return report;
}

}  // namespace circform
