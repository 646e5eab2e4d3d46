#include <gtest/gtest.h>

#include <optional>
#include <vector>

#include "circform/agent.hpp"
#include "circform/error.hpp"
#include "circform/kinematics.hpp"
#include "circform/rng.hpp"

using namespace circform;

namespace {

const Speeds kSpeeds{0.0, 0.005, 0.01};
const SensingParams kSensing{kPi / 4, 0.02};

EstimatorBank bank_with(std::vector<MultiInterval> gamma, int self = 0) {
  EstimatorBank b;
  b.self = self;
  b.gamma = std::move(gamma);
  return b;
}

}  // namespace

TEST(PeerInput, Examples) {
  EXPECT_EQ(estimate_peer_input(true, false, true, kSpeeds), Interval::point(0.005));
  EXPECT_EQ(estimate_peer_input(true, true, true, kSpeeds), Interval(0.005, 0.015));
  EXPECT_EQ(estimate_peer_input(false, true, false, kSpeeds), Interval(0.0, 0.015));
  EXPECT_EQ(estimate_peer_input(false, false, true, kSpeeds), Interval(0.0, 0.015));
}

TEST(RelativeInput, Examples) {
  EXPECT_EQ(relative_input_estimate(0.0, Interval(0, 0.015)), Interval(-0.015, 0));
  EXPECT_NEAR(relative_input_estimate(0.015, Interval::point(0.005)).lo(), 0.01, 1e-17);
  const Interval r = relative_input_estimate(0.005, Interval(0.005, 0.015));
  EXPECT_NEAR(r.lo(), -0.01, 1e-17);
  EXPECT_EQ(r.hi(), 0.0);
}

TEST(Propagate, Examples) {
  EXPECT_TRUE(propagate(MultiInterval(), Interval(0, 1)).is_empty());

  const MultiInterval one = propagate(MultiInterval{Interval(0.1, 0.2)}, Interval::point(0.01));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one.pieces()[0].lo(), 0.11, 1e-16);
  EXPECT_NEAR(one.pieces()[0].hi(), 0.21, 1e-16);

  const MultiInterval two = propagate(MultiInterval{Interval(-0.2, -0.1), Interval(0.1, 0.2)},
                                      Interval(-0.015, 0));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_NEAR(two.pieces()[0].lo(), -0.215, 1e-16);
  EXPECT_EQ(two.pieces()[0].hi(), -0.1);
  EXPECT_NEAR(two.pieces()[1].lo(), 0.085, 1e-16);
  EXPECT_EQ(two.pieces()[1].hi(), 0.2);
}

TEST(Propagate, SplitsAcrossSeam) {
  const Propagation p = propagate_on_circle(MultiInterval{Interval(3.0, 3.1)}, Interval(0.05, 0.1));
  EXPECT_TRUE(p.wrapped);
  ASSERT_EQ(p.set.size(), 2u);
  EXPECT_EQ(p.set.pieces()[0].lo(), -kPi);
  EXPECT_NEAR(p.set.pieces()[0].hi(), 3.2 - kTwoPi, 1e-15);
  EXPECT_NEAR(p.set.pieces()[1].lo(), 3.05, 1e-15);
  EXPECT_EQ(p.set.pieces()[1].hi(), kPi);
}

TEST(Propagate, FullCircleStaysFull) {
  const Propagation p =
      propagate_on_circle(MultiInterval{Interval(-kPi, kPi)}, Interval(-0.015, 0.0));
  EXPECT_FALSE(p.wrapped);
  EXPECT_EQ(p.set, MultiInterval{Interval(-kPi, kPi)});
}

TEST(Correct, NoEdgeBeforeIdentificationResets) {
  const MultiInterval r =
      correct(MultiInterval{Interval(0.1, 0.2)}, false, false, std::nullopt, kSensing);
  EXPECT_EQ(r, (MultiInterval{Interval(-kPi, -kPi / 4), Interval(kPi / 4, kPi)}));
}

TEST(Correct, EdgeIntersectsBothSigns) {
  const MultiInterval prior{Interval(-kPi, -kPi / 4), Interval(kPi / 4, kPi)};
  EXPECT_TRUE(correct(prior, false, false, Interval(0.08, 0.12), kSensing).is_empty());

  const MultiInterval full{Interval(-kPi, kPi)};
  EXPECT_EQ(correct(full, false, false, Interval(0.08, 0.12), kSensing),
            (MultiInterval{Interval(-0.12, -0.08), Interval(0.08, 0.12)}));
}

TEST(Correct, FollowerBranches) {
  EXPECT_EQ(correct(MultiInterval{Interval(0.1, 0.14)}, true, true, Interval(0.08, 0.12), kSensing),
            MultiInterval{Interval(0.1, 0.12)});
  EXPECT_EQ(correct(MultiInterval{Interval(0.7, 0.9)}, true, true, std::nullopt, kSensing),
            MultiInterval{Interval(kPi / 4, 0.9)});
  EXPECT_TRUE(
      correct(MultiInterval{Interval(0.1, 0.2)}, true, false, Interval(0.1, 0.2), kSensing).is_empty());
}

TEST(TryIdentify, Examples) {
  EXPECT_EQ(try_identify(bank_with({MultiInterval(), MultiInterval{Interval(0.05, 0.1)},
                                    MultiInterval{Interval(0.5, 0.6)}})),
            1);
  EXPECT_EQ(try_identify(bank_with({MultiInterval(),
                                    MultiInterval{Interval(-0.1, -0.05), Interval(0.05, 0.1)},
                                    MultiInterval{Interval(0.5, 0.6)}})),
            std::nullopt);
  EXPECT_EQ(try_identify(bank_with({MultiInterval(), MultiInterval{Interval(0.05, 0.1)},
                                    MultiInterval{Interval(-0.6, -0.5)}})),
            1);
}

TEST(TryIdentify, OverlapBlocks) {
  EXPECT_EQ(try_identify(bank_with({MultiInterval(), MultiInterval{Interval(0.05, 0.3)},
                                    MultiInterval{Interval(0.2, 0.6)}})),
            std::nullopt);
}

TEST(TryIdentify, MixedSignPeerConstrainsByPositivePart) {
  EstimatorBank b = bank_with({MultiInterval(), MultiInterval{Interval(0.1, 0.1)},
                               MultiInterval{Interval(0.2, 0.3)}});
  EXPECT_EQ(try_identify(b), 1);
  b.gamma[2] = MultiInterval{Interval(-0.3, -0.2), Interval(0.05, 0.06)};
  EXPECT_EQ(try_identify(b), std::nullopt);
}

// Two strictly positive candidates cannot both sit below each other, so a
// random bank never reports ambiguity.
TEST(TryIdentify, RandomBanksNeverAmbiguous) {
  RandomStream rng(401);
  for (int c = 0; c < 20000; ++c) {
    std::vector<MultiInterval> g{MultiInterval()};
    for (int j = 1; j < 5; ++j) {
      const double lo = rng.uniform(0.0, kPi);
      const double hi = rng.uniform(lo, kPi);
      g.push_back(rng.uniform01() < 0.5 ? MultiInterval{Interval(lo, hi)}
                                        : MultiInterval{Interval(-hi, -lo), Interval(lo, hi)});
    }
    ASSERT_NO_THROW(try_identify(bank_with(g)));
  }
}

TEST(TryIdentify, RejectsLatchedBank) {
  EstimatorBank b = bank_with({MultiInterval(), MultiInterval{Interval(0.1, 0.2)}});
  b.indicator = true;
  b.follower = 1;
  EXPECT_THROW(try_identify(b), std::logic_error);
}

TEST(ScalarEstimate, Examples) {
  EstimatorBank b = bank_with({MultiInterval(), MultiInterval{Interval(0.1, 0.12)}});
  b.indicator = true;
  b.follower = 1;
  EXPECT_EQ(scalar_estimate(b), 0.12);
  b.gamma[1] = MultiInterval{Interval::point(0.2)};
  EXPECT_EQ(scalar_estimate(b), 0.2);
  b.gamma[1] = MultiInterval{Interval(kPi / 4, kPi / 4 + 0.015)};
  EXPECT_EQ(scalar_estimate(b), kPi / 4 + 0.015);
}

TEST(Control, Examples) {
  const double psi = kTwoPi / 6;
  EstimatorBank b = bank_with({MultiInterval(), MultiInterval{Interval(0.5, psi - 0.01)}}, 0);
  EXPECT_EQ(control(AgentRole{true}, b, psi, kSpeeds), 0.005);
  EXPECT_EQ(control(AgentRole{false}, b, psi, kSpeeds), 0.0);
  b.indicator = true;
  b.follower = 1;
  EXPECT_EQ(control(AgentRole{false}, b, psi, kSpeeds), kSpeeds.push());
  b.gamma[1] = MultiInterval{Interval(0.5, psi)};
  EXPECT_EQ(control(AgentRole{false}, b, psi, kSpeeds), kSpeeds.push());  // sgn+(0) = 1
  b.gamma[1] = MultiInterval{Interval(0.5, std::nextafter(psi, 4.0))};
  EXPECT_EQ(control(AgentRole{false}, b, psi, kSpeeds), 0.005);
}

TEST(AgentLoop, SymmetricMeasurementKeepsBothSigns) {
  Agent a(1, 3, false);
  const SensingParams p{kPi / 4, 0.0};
  std::vector<std::optional<Interval>> ups(3);
  ups[0] = Interval::point(0.1);
  EXPECT_FALSE(a.observe(0, ups, p));
  a.decide(kTwoPi / 3, kSpeeds);
  a.predict(kSpeeds);
  ups[0] = Interval::point(0.1);
  EXPECT_FALSE(a.observe(1, ups, p));
  EXPECT_EQ(a.bank().gamma[0].size(), 2u);
}

TEST(AgentLoop, ShrinkingDistanceWhileStillResolvesSign) {
  Agent a(1, 3, false);
  const SensingParams p{kPi / 4, 0.0};
  std::vector<std::optional<Interval>> ups(3);
  ups[0] = Interval::point(0.1);
  EXPECT_FALSE(a.observe(0, ups, p));
  a.decide(kTwoPi / 3, kSpeeds);
  a.predict(kSpeeds);
  // Standing still, only a peer behind can get closer.
  ups[0] = Interval::point(0.095);
  EXPECT_TRUE(a.observe(1, ups, p));
  EXPECT_EQ(a.bank().follower, 0);
  ASSERT_TRUE(a.bank().theta_hat.has_value());
  EXPECT_NEAR(*a.bank().theta_hat, 0.095, 1e-9);
}

TEST(AgentLoop, EntryFromOutOfRangeLatchesAndDropsOtherPeers) {
  Agent a(1, 3, false);
  const SensingParams p{kPi / 4, 0.0};
  std::vector<std::optional<Interval>> ups(3);
  EXPECT_FALSE(a.observe(0, ups, p));
  a.decide(kTwoPi / 3, kSpeeds);
  a.predict(kSpeeds);
  ups[0] = Interval::point(kPi / 4 - 0.005);
  EXPECT_TRUE(a.observe(1, ups, p));
  const EstimatorBank& b = a.bank();
  EXPECT_TRUE(b.indicator);
  EXPECT_EQ(b.follower, 0);
  EXPECT_EQ(b.k_identified, 1);
  EXPECT_TRUE(b.gamma[2].is_empty());
  ASSERT_TRUE(b.theta_hat.has_value());
  EXPECT_NEAR(*b.theta_hat, kPi / 4 - 0.005, 1e-11);
  EXPECT_EQ(a.decide(kTwoPi / 3, kSpeeds), kSpeeds.push());
}

TEST(AgentLoop, EmptySetRaisesInconsistency) {
  Agent a(1, 2, false);
  const SensingParams p{kPi / 4, 0.0};
  std::vector<std::optional<Interval>> ups(2);
  a.observe(0, ups, p);  // out of range: [-pi,-pi/4] u [pi/4,pi]
  a.decide(kPi, kSpeeds);
  a.predict(kSpeeds);
  ups[0] = Interval::point(0.1);  // inconsistent with the prior
  EXPECT_THROW(a.observe(1, ups, p), EstimatorInconsistency);
}

TEST(AgentLoop, PacemakerIgnoresSensing) {
  Agent a(0, 3, true);
  std::vector<std::optional<Interval>> ups(3);
  EXPECT_FALSE(a.observe(0, ups, kSensing));
  EXPECT_EQ(a.decide(1.0, kSpeeds), 0.005);
}
