#include <gtest/gtest.h>

#include <optional>
#include <vector>

#include "circform/bounds.hpp"
#include "circform/error.hpp"
#include "circform/run.hpp"

using namespace circform;

// Expected values come from tools/oracles/bounds.py.

TEST(Bounds, IdentificationExamples) {
  EXPECT_EQ(identification_bound(kPi / 3, 0.005, 0.01), 204);
  EXPECT_EQ(identification_bound(2 * (0.005 + 0.01), 0.005, 0.01), 0);
}

TEST(Bounds, NegativeInitialSpacingUsesForwardGap) {
  EXPECT_EQ(identification_bound(-kPi / 2, 0.005, 0.005), 939);
}

TEST(Bounds, PushIncrementStudyParameters) {
  EXPECT_EQ(push_increment(kPi / 4, kPi / 3, 0.005, 0.005), 208);
}

TEST(Bounds, CascadeExamples) {
  EXPECT_EQ(cascade_bound(0.5, 100, 180, kPi / 3, 0.005, 0.005), 402);
  EXPECT_EQ(cascade_bound(1.2, 100, 180, kPi / 3, 0.005, 0.005), 542);
}

TEST(Bounds, TheoremBoundsAssemblesPerAgent) {
  SimConfig c;
  c.k_gain = 0.005;
  const std::vector<double> rel{0.3, kPi / 3, 0.5, 1.2, 0.9, 1.0};
  const std::vector<std::optional<long>> id{std::nullopt, 10, 100, 150, std::nullopt, 300};
  const std::vector<std::optional<long>> kc{std::nullopt, 50, 180, 260, 300, std::nullopt};
  const TheoremBounds b = theorem_bounds(c, rel, id, kc);
  EXPECT_EQ(b.t1, identification_bound(kPi / 3, 0.005, 0.005));
  EXPECT_EQ(b.t2, b.t1 + 208);
  EXPECT_FALSE(b.t4[1].has_value());
  ASSERT_TRUE(b.t4[2].has_value());
  EXPECT_EQ(*b.t4[2], cascade_bound(0.5, 10, 50, kPi / 3, 0.005, 0.005));
  EXPECT_EQ(*b.t4[3], 542);  // rel 1.2 behind a follower with k_id 100, k_conv 180
  EXPECT_FALSE(b.t4[5].has_value());  // follower never identified
}

TEST(DetectConvergence, MatchesOnlineTracker) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    SimConfig c;
    c.seed = s;
    const RunResult r = run(c, true);
    ASSERT_EQ(r.summary.status, RunStatus::kOk);
    const auto det = detect_convergence(r.trajectory, c.psi());
    ASSERT_EQ(det.size(), static_cast<std::size_t>(c.n_agents - 1));
    for (const auto& d : det) {
      const auto& a = r.summary.agents[static_cast<std::size_t>(d.agent)];
      EXPECT_EQ(d.k_converged, *a.k_converged);
      EXPECT_NEAR(d.steady_error, a.steady_error, 1e-12);
      EXPECT_LE(d.steady_error, c.k_gain);
      EXPECT_LE(d.max_deviation, kConstancyTolerance);
    }
    EXPECT_LE(r.summary.closing_gap, (c.n_agents - 1) * c.k_gain);
  }
}

TEST(DetectConvergence, TruncatedRunNotConverged) {
  SimConfig c;
  c.horizon = 100;
  const RunResult r = run(c, true);
  EXPECT_THROW(detect_convergence(r.trajectory, c.psi()), NotConverged);
  EXPECT_THROW(detect_convergence({}, c.psi()), NotConverged);
}

TEST(DefaultHorizon, CoversObservedConvergence) {
  for (std::uint64_t s = 1; s <= 20; ++s) {
    SimConfig c;
    c.seed = s;
    const RunSummary r = run(c, false).summary;
    ASSERT_TRUE(r.last_convergence().has_value());
    EXPECT_LT(*r.last_convergence() + kGraceSteps, default_horizon(c));
  }
}
