#pragma once

// Whole-run driver and the per-run summary with every theorem check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "circform/bounds.hpp"
#include "circform/config.hpp"
#include "circform/rng.hpp"
#include "circform/sim.hpp"

namespace circform {

// Steps kept after the last deactivation so constancy is observed, not assumed.
inline constexpr long kGraceSteps = 50;

enum class RunStatus { kOk, kDiagnostic, kNotConverged };

inline const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kDiagnostic: return "diagnostic";
    case RunStatus::kNotConverged: return "not_converged";
  }
  return "unknown";
}

struct BoundCheck {
  long bound = 0;
  std::optional<long> observed;
  bool pass = false;
};

struct AgentOutcome {
  int index = 0;
  double initial_rel = 0.0;
  double final_rel = 0.0;
  std::optional<int> follower;
  std::optional<long> k_identified;
  std::optional<long> k_converged;
  std::optional<long> k_range_exit;
  double steady_error = 0.0;
  double post_conv_max_dev = 0.0;
  double post_conv_max_err = 0.0;
  double stasis_max_dev = 0.0;
  long soundness_violations = 0;
  long bias_violations = 0;
  bool overtaken = false;
};

struct RunSummary {
  RunStatus status = RunStatus::kOk;
  SimConfig config;
  std::uint64_t seed = 0;
  std::string generator{RandomStream::kGeneratorId};
  double psi = 0.0;
  long horizon = 0;
  long steps = 0;
  std::vector<double> initial_phases;
  std::vector<int> physical_index;
  std::vector<AgentOutcome> agents;  // index 0 is the pacemaker

  double closing_gap = 0.0;        // |vartheta_{1,N} - psi| at the end
  double max_steady_error = 0.0;   // over i = 2..N
  double epsilon_achieved = 0.0;   // max over all consecutive pairs incl. (1,N)
  bool constancy_pass = false;

  BoundCheck t1;
  BoundCheck t2;
  bool t2_band_pass = false;  // |vartheta_21 - psi| <= K from k2c on
  bool t3_pass = false;
  std::vector<std::optional<BoundCheck>> t4;  // by agent index, set for i >= 2
  bool t4_pass = false;
  bool cascade_ordered = false;
  bool stasis_pass = false;

  AssumptionReport assumptions;
  std::vector<Event> diagnostics;
  long seam_wraps = 0;
  long soundness_violations = 0;
  long enclosure_violations = 0;
  long bias_violations = 0;

  std::optional<long> last_convergence() const {
    std::optional<long> last;
    for (std::size_t i = 1; i < agents.size(); ++i) {
      if (!agents[i].k_converged) return std::nullopt;
      last = std::max(last.value_or(0), *agents[i].k_converged);
    }
    return last;
  }

  bool theorems_pass() const noexcept {
    return t1.pass && t2.pass && t2_band_pass && t3_pass && t4_pass;
  }
};

struct RunResult {
  RunSummary summary;
  std::vector<RoundRecord> trajectory;
};

inline long resolve_horizon(const SimConfig& c) {
  return c.horizon > 0 ? c.horizon : default_horizon(c);
}

namespace detail {

inline void fill_bounds(RunSummary& s, const World& w) {
  const SimConfig& c = s.config;
  const int n = c.n_agents;
  const double tol = kOracleSlack;
  std::vector<double> initial_rel;
  std::vector<std::optional<long>> k_id;
  std::vector<std::optional<long>> k_conv;
  for (const auto& a : s.agents) {
    initial_rel.push_back(a.initial_rel);
    k_id.push_back(a.k_identified);
    k_conv.push_back(a.k_converged);
  }
  const TheoremBounds b = theorem_bounds(c, initial_rel, k_id, k_conv);

  s.t1 = {b.t1, k_id[1], k_id[1] && *k_id[1] <= b.t1};
  s.t2 = {b.t2, k_conv[1], k_conv[1] && *k_conv[1] <= b.t2};
  s.t2_band_pass = k_conv[1] && s.agents[1].post_conv_max_err <= c.k_gain + tol;

  s.t4.assign(static_cast<std::size_t>(n), std::nullopt);
  s.t4_pass = true;
  for (int i = 2; i < n; ++i) {
    const auto& bound = b.t4[static_cast<std::size_t>(i)];
    const auto& obs = k_conv[static_cast<std::size_t>(i)];
    BoundCheck chk{bound.value_or(0), obs, bound && obs && *obs <= *bound};
    s.t4[static_cast<std::size_t>(i)] = chk;
    s.t4_pass = s.t4_pass && chk.pass;
  }

  bool converged = true;
  s.constancy_pass = true;
  s.max_steady_error = 0.0;
  for (int i = 1; i < n; ++i) {
    const auto& a = s.agents[static_cast<std::size_t>(i)];
    converged = converged && a.k_converged.has_value();
    s.constancy_pass = s.constancy_pass && a.post_conv_max_dev <= kConstancyTolerance;
    s.max_steady_error = std::max(s.max_steady_error, a.steady_error);
  }
  s.closing_gap = std::abs(w.rel(0) - s.psi);
  s.epsilon_achieved = std::max(s.max_steady_error, s.closing_gap);
  s.t3_pass = converged && s.constancy_pass && s.max_steady_error <= c.k_gain + tol &&
              s.closing_gap <= (n - 1) * c.k_gain + tol;

  s.cascade_ordered = true;
  for (int i = 2; i < n; ++i) {
    const auto& prev = k_id[static_cast<std::size_t>(i - 1)];
    const auto& cur = k_id[static_cast<std::size_t>(i)];
    if (!prev || !cur || !(*prev < *cur)) s.cascade_ordered = false;
  }
  if (!k_id[1]) s.cascade_ordered = false;

  s.stasis_pass = true;
  for (int i = 2; i < n; ++i) {
    s.stasis_pass = s.stasis_pass &&
                    s.agents[static_cast<std::size_t>(i)].stasis_max_dev <= kConstancyTolerance;
  }
}

}  // namespace detail

// Runs until the horizon, an aborting diagnostic, or kGraceSteps after every
// agent has deactivated.
inline RunResult run(const SimConfig& config, bool keep_trajectory) {
  World w(config, keep_trajectory);
  const long horizon = resolve_horizon(config);

  RunSummary s;
  s.config = config;
  s.seed = config.seed;
  s.psi = config.psi();
  s.horizon = horizon;
  s.assumptions = validate(config);
  for (const auto& p : w.phases()) s.initial_phases.push_back(p.value());
  s.physical_index = w.physical_index();

  std::optional<long> stop_at;
  while (w.k() < horizon && !w.aborted()) {
    w.step();
    if (!stop_at && w.all_converged()) stop_at = w.k() + kGraceSteps;
    if (stop_at && w.k() >= *stop_at) break;
  }
  s.steps = w.k();

  const int n = w.size();
  for (int i = 0; i < n; ++i) {
    const AgentTrack& t = w.tracks()[static_cast<std::size_t>(i)];
    AgentOutcome a;
    a.index = i;
    a.initial_rel = t.initial_rel;
    a.final_rel = w.rel(i);
    a.follower = t.follower;
    a.k_identified = t.k_identified;
    a.k_converged = t.k_converged;
    a.k_range_exit = t.k_range_exit;
    a.steady_error = std::abs(a.final_rel - s.psi);
    a.post_conv_max_dev = t.post_conv_max_dev;
    a.post_conv_max_err = t.post_conv_max_err;
    a.stasis_max_dev = t.stasis_max_dev;
    a.soundness_violations = t.soundness_violations;
    a.bias_violations = t.bias_violations;
    a.overtaken = t.overtaken;
    s.bias_violations += t.bias_violations;
    s.agents.push_back(a);
  }

  for (const auto& e : w.events()) {
    if (is_diagnostic(e.kind)) s.diagnostics.push_back(e);
  }
  s.seam_wraps = w.seam_wraps();
  s.soundness_violations = w.soundness_violations();
  s.enclosure_violations = w.enclosure_violations();

  detail::fill_bounds(s, w);

  if (!s.diagnostics.empty() || w.aborted()) {
    s.status = RunStatus::kDiagnostic;
  } else if (!w.all_converged()) {
    s.status = RunStatus::kNotConverged;
  } else {
    s.status = RunStatus::kOk;
  }
  return {std::move(s), w.take_trajectory()};
}

}  // namespace circform
