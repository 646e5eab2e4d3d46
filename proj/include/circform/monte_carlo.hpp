#pragma once

// Seeded parameter sweep over (K, phi) cells with per-K aggregate rows.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "circform/config.hpp"
#include "circform/error.hpp"
#include "circform/rng.hpp"
#include "circform/run.hpp"

namespace circform {

// Runs f(0..count-1) on a small thread pool. Each call writes only its own
// slot, so results do not depend on scheduling.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct SweepGrid {
  SimConfig base;                               // N, omega0, theta_max, horizon
  std::vector<double> k_mults{1, 2, 3, 4};      // K = mult * omega0
  std::vector<double> phi_mults{2, 3, 4, 5};    // phi = mult * K
  int runs = 100;
  std::uint64_t base_seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SweepCell {
  double k_mult = 0.0;
  double phi_mult = 0.0;
  double k_gain = 0.0;
  double phi = 0.0;
  int runs = 0;
  int ok = 0;
  int failed = 0;
  double mean_last_convergence = 0.0;  // <k_N^c> over ok runs
  double eta = 0.0;                    // <|steady spacing - psi|> over i = 2..N and ok runs
  long sum_last_convergence = 0;
  double sum_error = 0.0;
  long error_samples = 0;
};

struct SweepAggregate {
  double k_mult = 0.0;
  double k_gain = 0.0;
  int runs = 0;
  int ok = 0;
  int failed = 0;
  double mean_last_convergence = 0.0;
  double eta = 0.0;
};

struct SweepTable {
  std::vector<SweepCell> cells;
  std::vector<SweepAggregate> aggregates;
  std::vector<std::string> failures;  // one line per failed run
};

inline std::uint64_t run_seed(std::uint64_t base_seed, std::size_t cell, int run_index) {
  return derive_seed(derive_seed(base_seed, cell), static_cast<std::uint64_t>(run_index));
}

// Config-level problems surface before any run starts.
inline std::vector<SimConfig> sweep_cell_configs(const SweepGrid& g) {
  std::vector<SimConfig> out;
  for (double km : g.k_mults) {
    for (double pm : g.phi_mults) {
      SimConfig c = g.base;
      c.k_gain = km * g.base.omega0;
      c.phi = pm * c.k_gain;
      require_valid(c);
      out.push_back(c);
    }
  }
  return out;
}

inline SweepTable monte_carlo(const SweepGrid& g) {
  if (g.runs < 1) throw InvalidConfig({clause::kRunControl}, "runs must be >= 1");
  const std::vector<SimConfig> cells = sweep_cell_configs(g);
  const std::size_t runs = static_cast<std::size_t>(g.runs);
  const std::size_t total = cells.size() * runs;

  struct Slot {
    bool ok = false;
    long last = 0;
    double error_sum = 0.0;
    long error_n = 0;
    std::string failure;
  };
  std::vector<Slot> slots(total);

  parallel_for(total, g.threads, [&](std::size_t idx) {
    const std::size_t cell = idx / runs;
    const int r = static_cast<int>(idx % runs);
    SimConfig c = cells[cell];
    c.seed = run_seed(g.base_seed, cell, r);
    Slot& slot = slots[idx];
    try {
      const RunSummary s = run(c, false).summary;
      if (s.status != RunStatus::kOk) {
        slot.failure = std::string(to_string(s.status)) +
                       (s.diagnostics.empty() ? "" : ": " + s.diagnostics.front().detail);
      } else {
        slot.ok = true;
        slot.last = s.last_convergence().value_or(0);
        for (std::size_t i = 1; i < s.agents.size(); ++i) {
          slot.error_sum += s.agents[i].steady_error;
          ++slot.error_n;
        }
      }
    } catch (const Error& e) {
      slot.failure = e.what();
    }
  });

  SweepTable t;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    SweepCell cell;
    cell.k_mult = g.k_mults[ci / g.phi_mults.size()];
    cell.phi_mult = g.phi_mults[ci % g.phi_mults.size()];
    cell.k_gain = cells[ci].k_gain;
    cell.phi = cells[ci].phi;
    cell.runs = g.runs;
    for (std::size_t r = 0; r < runs; ++r) {
      const Slot& s = slots[ci * runs + r];
      if (!s.ok) {
        ++cell.failed;
        t.failures.push_back("K=" + detail::num(cell.k_gain) + " phi=" + detail::num(cell.phi) +
                             " run " + std::to_string(r) + ": " + s.failure);
        continue;
      }
      ++cell.ok;
      cell.sum_last_convergence += s.last;
      cell.sum_error += s.error_sum;
      cell.error_samples += s.error_n;
    }
    if (cell.ok > 0) {
      cell.mean_last_convergence = static_cast<double>(cell.sum_last_convergence) / cell.ok;
      cell.eta = cell.sum_error / static_cast<double>(cell.error_samples);
    }
    t.cells.push_back(cell);
  }

  const std::size_t per_k = g.phi_mults.size();
  for (std::size_t ki = 0; ki < g.k_mults.size(); ++ki) {
    SweepAggregate a;
    a.k_mult = g.k_mults[ki];
    a.k_gain = a.k_mult * g.base.omega0;
    long sum_last = 0;
    double sum_err = 0.0;
    long err_n = 0;
    for (std::size_t pi = 0; pi < per_k; ++pi) {
      const SweepCell& c = t.cells[ki * per_k + pi];
      a.runs += c.runs;
      a.ok += c.ok;
      a.failed += c.failed;
      sum_last += c.sum_last_convergence;
      sum_err += c.sum_error;
      err_n += c.error_samples;
    }
    if (a.ok > 0) {
      a.mean_last_convergence = static_cast<double>(sum_last) / a.ok;
      a.eta = sum_err / static_cast<double>(err_n);
    }
    t.aggregates.push_back(a);
  }
  return t;
}

}  // namespace circform
