#pragma once

// Range-limited, sign-ambiguous proximity sensing and the proximity graph it
// induces.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "circform/interval.hpp"
#include "circform/kinematics.hpp"
#include "circform/rng.hpp"

namespace circform {

struct SensingParams {
  double theta_max = kPi / 4.0;  // detecting distance
  double phi = 0.0;              // noise amplitude bound

  Interval in_range() const { return Interval(0.0, theta_max); }
  // (theta_max, pi] stored closed.
  Interval out_of_range() const { return Interval(theta_max, kPi); }
};

struct Measurement {
  int i = 0;
  int j = 0;
  double y = 0.0;
};

class ProximityGraph {
 public:
  ProximityGraph() = default;
  explicit ProximityGraph(int n) : n_(n), adj_(static_cast<std::size_t>(n) * n, 0) {}

  int size() const noexcept { return n_; }

  void add_edge(int i, int j) {
    adj_[index(i, j)] = 1;
    adj_[index(j, i)] = 1;
  }

  bool has_edge(int i, int j) const noexcept { return adj_[index(i, j)] != 0; }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        if (has_edge(i, j)) out.emplace_back(i, j);
      }
    }
    return out;
  }

  std::size_t edge_count() const noexcept {
    return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), 1)) / 2;
  }

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<unsigned char> adj_;
};

inline double angular_distance(double vartheta) noexcept { return std::abs(vartheta); }

// One draw from the stream per call, whatever the bound.
inline double sample_noise(RandomStream& stream, double phi) {
  const double u = stream.uniform01();
  return phi * (2.0 * u - 1.0);
}

inline std::optional<double> measure(double alpha, double nu, const SensingParams& p) {
  if (alpha <= p.theta_max) return alpha + nu;
  return std::nullopt;
}

// Empty only when y lies further than phi outside [0, theta_max], which the
// noise bound rules out.
inline Interval build_upsilon(double y, const SensingParams& p) {
  const double lo = std::max(y - p.phi, 0.0);
  const double hi = std::min(y + p.phi, p.theta_max);
  if (lo > hi) return Interval::empty();
  return Interval(lo, hi);
}

inline ProximityGraph build_graph(std::span<const Phase> phases, const SensingParams& p) {
  const int n = static_cast<int>(phases.size());
  ProximityGraph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (angular_distance(relative_phase(phases[i], phases[j])) <= p.theta_max) {
        g.add_edge(i, j);
      }
    }
  }
  return g;
}

}  // namespace circform
