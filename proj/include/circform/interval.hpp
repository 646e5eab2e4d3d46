#pragma once

// Closed-interval and two-piece multi-interval algebra.
//
// Endpoints are plain doubles with no outward rounding. The empty set is a
// first-class value and every operation is total over it, except hull().

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>

#include "circform/error.hpp"

namespace circform {

class Interval {
 public:
  // Default-constructed interval is empty.
  constexpr Interval() = default;

  Interval(double lo, double hi) : lo_(lo), hi_(hi), empty_(false) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw std::invalid_argument("Interval endpoints must be finite");
    }
    if (lo > hi) {
      throw std::invalid_argument("Interval requires lo <= hi");
    }
  }

  static Interval point(double x) { return Interval(x, x); }
  static constexpr Interval empty() { return Interval(); }

  constexpr bool is_empty() const noexcept { return empty_; }

  double lo() const noexcept {
    assert(!empty_);
    return lo_;
  }
  double hi() const noexcept {
    assert(!empty_);
    return hi_;
  }
  double width() const noexcept { return empty_ ? 0.0 : hi_ - lo_; }

  bool contains(double x) const noexcept { return !empty_ && lo_ <= x && x <= hi_; }

  // Containment widened by `slack` on both sides; used by the runtime oracles.
  bool contains(double x, double slack) const noexcept {
    return !empty_ && lo_ - slack <= x && x <= hi_ + slack;
  }

  bool contains(const Interval& other) const noexcept {
    if (other.empty_) return true;
    return !empty_ && lo_ <= other.lo_ && other.hi_ <= hi_;
  }

  friend bool operator==(const Interval& a, const Interval& b) noexcept {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Interval& a) {
    if (a.empty_) return os << "{}";
    return os << '[' << a.lo_ << ", " << a.hi_ << ']';
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  bool empty_ = true;
};

inline Interval minkowski_sum(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return Interval(a.lo() + b.lo(), a.hi() + b.hi());
}

inline Interval intersect(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (lo > hi) return Interval::empty();
  return Interval(lo, hi);
}

inline Interval negate(const Interval& a) {
  if (a.is_empty()) return a;
  return Interval(-a.hi(), -a.lo());
}

// Union of at most two disjoint closed intervals, sorted by lower endpoint.
// Pieces that overlap or touch are merged on construction.
class MultiInterval {
 public:
  static constexpr std::size_t kMaxPieces = 2;

  MultiInterval() = default;

  explicit MultiInterval(const Interval& a) {
    if (!a.is_empty()) pieces_[size_++] = a;
  }

  MultiInterval(std::initializer_list<Interval> pieces)
      : MultiInterval(from_pieces(std::span<const Interval>(pieces.begin(), pieces.size()))) {}

  // Sorts, drops empties and merges overlapping or touching pieces. Throws
  // MoreThanTwoPieces when more than two disjoint pieces survive.
  static MultiInterval from_pieces(std::span<const Interval> input) {
    std::array<Interval, 8> buf{};
    std::size_t n = 0;
    for (const auto& p : input) {
      if (p.is_empty()) continue;
      if (n == buf.size()) throw MoreThanTwoPieces("too many operand pieces");
      buf[n++] = p;
    }
    std::sort(buf.begin(), buf.begin() + n,
              [](const Interval& a, const Interval& b) { return a.lo() < b.lo(); });

    MultiInterval out;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.size_ > 0 && buf[i].lo() <= out.pieces_[out.size_ - 1].hi()) {
        auto& last = out.pieces_[out.size_ - 1];
        last = Interval(last.lo(), std::max(last.hi(), buf[i].hi()));
        continue;
      }
      if (out.size_ == kMaxPieces) {
        throw MoreThanTwoPieces("multi-interval would need more than two pieces");
      }
      out.pieces_[out.size_++] = buf[i];
    }
    return out;
  }

  std::span<const Interval> pieces() const noexcept { return {pieces_.data(), size_}; }
  std::size_t size() const noexcept { return size_; }
  bool is_empty() const noexcept { return size_ == 0; }

  bool contains(double x) const noexcept {
    return std::any_of(pieces().begin(), pieces().end(),
                       [x](const Interval& p) { return p.contains(x); });
  }

  bool contains(double x, double slack) const noexcept {
    return std::any_of(pieces().begin(), pieces().end(),
                       [x, slack](const Interval& p) { return p.contains(x, slack); });
  }

  friend bool operator==(const MultiInterval& a, const MultiInterval& b) noexcept {
    return std::equal(a.pieces().begin(), a.pieces().end(), b.pieces().begin(),
                      b.pieces().end());
  }

  friend std::ostream& operator<<(std::ostream& os, const MultiInterval& s) {
    os << '{';
    for (std::size_t i = 0; i < s.size_; ++i) os << (i ? ", " : "") << s.pieces_[i];
    return os << '}';
  }

 private:
  std::array<Interval, kMaxPieces> pieces_{};
  std::size_t size_ = 0;
};

inline Interval hull(const MultiInterval& s) {
  if (s.is_empty()) throw EmptyHull("hull of an empty multi-interval");
  const auto p = s.pieces();
  return Interval(p.front().lo(), p.back().hi());
}

inline MultiInterval unite(const MultiInterval& s, const MultiInterval& t) {
  std::array<Interval, 4> buf{};
  std::size_t n = 0;
  for (const auto& p : s.pieces()) buf[n++] = p;
  for (const auto& p : t.pieces()) buf[n++] = p;
  return MultiInterval::from_pieces({buf.data(), n});
}

inline MultiInterval multi_intersect(const MultiInterval& s, const MultiInterval& t) {
  std::array<Interval, 4> buf{};
  std::size_t n = 0;
  for (const auto& a : s.pieces()) {
    for (const auto& b : t.pieces()) buf[n++] = intersect(a, b);
  }
  return MultiInterval::from_pieces({buf.data(), n});
}

inline MultiInterval multi_sum(const MultiInterval& s, const Interval& a) {
  if (a.is_empty()) return {};
  std::array<Interval, 2> buf{};
  std::size_t n = 0;
  for (const auto& p : s.pieces()) buf[n++] = minkowski_sum(p, a);
  return MultiInterval::from_pieces({buf.data(), n});
}

inline MultiInterval negate(const MultiInterval& s) {
  std::array<Interval, 2> buf{};
  std::size_t n = 0;
  for (const auto& p : s.pieces()) buf[n++] = negate(p);
  return MultiInterval::from_pieces({buf.data(), n});
}

}  // namespace circform
