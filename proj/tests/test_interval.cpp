#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "circform/error.hpp"
#include "circform/interval.hpp"
#include "circform/kinematics.hpp"
#include "circform/rng.hpp"

using namespace circform;

namespace {

constexpr int kCases = 100000;

double ulp(double x) {
  x = std::abs(x);
  return std::nextafter(x, std::numeric_limits<double>::infinity()) - x;
}

Interval random_interval(RandomStream& rng, double span = 10.0) {
  const double a = rng.uniform(-span, span);
  const double b = rng.uniform(-span, span);
  return Interval(std::min(a, b), std::max(a, b));
}

double random_point_in(RandomStream& rng, const Interval& a) {
  return std::clamp(a.lo() + rng.uniform01() * a.width(), a.lo(), a.hi());
}

// Protocol-shaped operand: one piece, or a sign-symmetric pair.
MultiInterval random_protocol_set(RandomStream& rng) {
  const double lo = rng.uniform(0.0, kPi);
  const double hi = rng.uniform(lo, kPi);
  if (rng.uniform01() < 0.5) return MultiInterval{Interval(lo, hi)};
  return MultiInterval{Interval(-hi, -lo), Interval(lo, hi)};
}

}  // namespace

TEST(Interval, DefaultIsEmpty) {
  EXPECT_TRUE(Interval().is_empty());
  EXPECT_TRUE(Interval::empty().is_empty());
  EXPECT_FALSE(Interval(1, 1).is_empty());
}

TEST(Interval, RejectsInvertedOrNonFinite) {
  EXPECT_THROW(Interval(2, 1), std::invalid_argument);
  EXPECT_THROW(Interval(0, std::numeric_limits<double>::infinity()), std::invalid_argument);
  EXPECT_THROW(Interval(std::nan(""), 0), std::invalid_argument);
}

TEST(Interval, MinkowskiExamples) {
  EXPECT_EQ(minkowski_sum(Interval(1, 2), Interval::point(0.5)), Interval(1.5, 2.5));
  EXPECT_EQ(minkowski_sum(Interval::point(0), Interval(-1, 3)), Interval(-1, 3));
  EXPECT_EQ(minkowski_sum(Interval(-1, 1), Interval(-1, 1)), Interval(-2, 2));
  EXPECT_TRUE(minkowski_sum(Interval::empty(), Interval(0, 1)).is_empty());
}

TEST(Interval, IntersectExamples) {
  EXPECT_EQ(intersect(Interval(0, 2), Interval(1, 3)), Interval(1, 2));
  EXPECT_TRUE(intersect(Interval(0, 1), Interval(2, 3)).is_empty());
  const Interval a(-0.3, 0.7);
  EXPECT_EQ(intersect(a, a), a);
}

TEST(Interval, NegateExamples) {
  EXPECT_EQ(negate(Interval(0.08, 0.12)), Interval(-0.12, -0.08));
  EXPECT_EQ(negate(Interval::point(0)), Interval::point(0));
  EXPECT_TRUE(negate(Interval::empty()).is_empty());
}

TEST(MultiInterval, HullExamples) {
  EXPECT_EQ(hull(MultiInterval{Interval(-3, -2), Interval(1, 4)}), Interval(-3, 4));
  EXPECT_EQ(hull(MultiInterval{Interval(1, 2)}), Interval(1, 2));
  EXPECT_EQ(hull(MultiInterval{Interval(-0.5, 0), Interval(0.2, 0.3)}), Interval(-0.5, 0.3));
  EXPECT_THROW(hull(MultiInterval()), EmptyHull);
}

TEST(MultiInterval, IntersectExamples) {
  const MultiInterval s{Interval(-kPi, -0.1), Interval(0.1, kPi)};
  const MultiInterval t{Interval(-0.12, -0.08), Interval(0.08, 0.12)};
  EXPECT_EQ(multi_intersect(s, t), (MultiInterval{Interval(-0.12, -0.1), Interval(0.1, 0.12)}));

  const MultiInterval u{Interval(0.2, 0.4)};
  const MultiInterval v{Interval(-0.3, -0.1), Interval(0.1, 0.3)};
  EXPECT_EQ(multi_intersect(u, v), (MultiInterval{Interval(0.2, 0.3)}));

  EXPECT_TRUE(multi_intersect(MultiInterval{Interval(0, 1)}, MultiInterval{Interval(2, 3)}).is_empty());
}

TEST(MultiInterval, SumExamples) {
  const MultiInterval s{Interval(-0.2, -0.1), Interval(0.1, 0.2)};
  const MultiInterval r = multi_sum(s, Interval(0, 0.05));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r.pieces()[0].lo(), -0.2);
  EXPECT_DOUBLE_EQ(r.pieces()[0].hi(), -0.05);
  EXPECT_DOUBLE_EQ(r.pieces()[1].lo(), 0.1);
  EXPECT_DOUBLE_EQ(r.pieces()[1].hi(), 0.25);

  EXPECT_EQ(multi_sum(s, Interval::point(0)), s);

  const MultiInterval m = multi_sum(MultiInterval{Interval(-0.06, -0.04), Interval(0.04, 0.06)},
                                    Interval(-0.05, 0.05));
  ASSERT_EQ(m.size(), 1u);
  EXPECT_NEAR(m.pieces()[0].lo(), -0.11, 1e-15);
  EXPECT_NEAR(m.pieces()[0].hi(), 0.11, 1e-15);
}

TEST(MultiInterval, TouchingPiecesMerge) {
  const MultiInterval m{Interval(0, 1), Interval(1, 2)};
  EXPECT_EQ(m.size(), 1u);
  EXPECT_EQ(hull(m), Interval(0, 2));
}

TEST(MultiInterval, ThreeDisjointPiecesRejected) {
  const Interval pieces[] = {Interval(0, 1), Interval(2, 3), Interval(4, 5)};
  EXPECT_THROW(MultiInterval::from_pieces(pieces), MoreThanTwoPieces);
}

TEST(MultiInterval, EmptyPiecesDropped) {
  const Interval pieces[] = {Interval::empty(), Interval(0, 1), Interval::empty()};
  EXPECT_EQ(MultiInterval::from_pieces(pieces), MultiInterval{Interval(0, 1)});
}

TEST(IntervalProperty, WidthAdditivity) {
  RandomStream rng(101);
  for (int c = 0; c < kCases; ++c) {
    const Interval a = random_interval(rng);
    const Interval b = random_interval(rng);
    const Interval s = minkowski_sum(a, b);
    const double scale = std::max({std::abs(s.lo()), std::abs(s.hi()), std::abs(a.lo()),
                                   std::abs(a.hi()), std::abs(b.lo()), std::abs(b.hi())});
    ASSERT_LE(std::abs(s.width() - (a.width() + b.width())), 4 * ulp(scale))
        << a << " + " << b;
  }
}

TEST(IntervalProperty, SumSoundness) {
  RandomStream rng(102);
  for (int c = 0; c < kCases; ++c) {
    const Interval a = random_interval(rng);
    const Interval b = random_interval(rng);
    const double x = random_point_in(rng, a);
    const double y = random_point_in(rng, b);
    const Interval s = minkowski_sum(a, b);
    const double sum = x + y;
    ASSERT_TRUE(s.contains(sum, 4 * ulp(std::max(std::abs(s.lo()), std::abs(s.hi())))))
        << x << " + " << y << " not in " << s;
  }
}

TEST(IntervalProperty, IntersectionContained) {
  RandomStream rng(103);
  for (int c = 0; c < kCases; ++c) {
    const Interval a = random_interval(rng);
    const Interval b = random_interval(rng);
    const Interval i = intersect(a, b);
    if (i.is_empty()) {
      ASSERT_TRUE(a.hi() < b.lo() || b.hi() < a.lo());
      continue;
    }
    ASSERT_TRUE(a.contains(i));
    ASSERT_TRUE(b.contains(i));
  }
}

TEST(IntervalProperty, HullContainsPieces) {
  RandomStream rng(104);
  for (int c = 0; c < kCases; ++c) {
    const Interval a = random_interval(rng);
    const Interval b = random_interval(rng);
    const Interval pieces[] = {a, b};
    MultiInterval m;
    try {
      m = MultiInterval::from_pieces(pieces);
    } catch (const MoreThanTwoPieces&) {
      FAIL() << "two pieces cannot exceed two";
    }
    const Interval h = hull(m);
    for (const auto& p : m.pieces()) ASSERT_TRUE(h.contains(p));
    ASSERT_TRUE(h.contains(a));
    ASSERT_TRUE(h.contains(b));
  }
}

TEST(IntervalProperty, NegationInvolution) {
  RandomStream rng(105);
  for (int c = 0; c < kCases; ++c) {
    const Interval a = random_interval(rng);
    ASSERT_EQ(negate(negate(a)), a);
    const MultiInterval m = random_protocol_set(rng);
    ASSERT_EQ(negate(negate(m)), m);
  }
}

TEST(IntervalProperty, MultiIntersectCommutativeIdempotent) {
  RandomStream rng(106);
  for (int c = 0; c < kCases; ++c) {
    const MultiInterval s = random_protocol_set(rng);
    const MultiInterval t = random_protocol_set(rng);
    ASSERT_EQ(multi_intersect(s, t), multi_intersect(t, s));
    ASSERT_EQ(multi_intersect(s, s), s);
  }
}

TEST(IntervalProperty, MultiIntersectMembership) {
  RandomStream rng(107);
  for (int c = 0; c < kCases / 10; ++c) {
    const MultiInterval s = random_protocol_set(rng);
    const MultiInterval t = random_protocol_set(rng);
    const MultiInterval i = multi_intersect(s, t);
    const double x = rng.uniform(-kPi, kPi);
    ASSERT_EQ(i.contains(x), s.contains(x) && t.contains(x)) << x;
  }
}
