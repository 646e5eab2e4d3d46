#pragma once

// Config files, trajectory and sweep tables, and run summaries.
//
// Config: one `key = value` per line, `#` starts a comment.
// Tables: comma-separated with a header row, floats at 17 significant digits.
// Summary: JSON with a schema_version field.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "circform/config.hpp"
#include "circform/error.hpp"
#include "circform/kinematics.hpp"
#include "circform/monte_carlo.hpp"
#include "circform/run.hpp"
#include "circform/sim.hpp"

namespace circform {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kConfigClause = "Config file";

inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] inline void config_error(const std::string& msg) {
  throw InvalidConfig({kConfigClause}, msg);
}

inline double parse_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    config_error("bad number for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return x;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    config_error("bad integer for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return x;
}

}  // namespace detail

inline SimConfig parse_config(std::string_view text) {
  SimConfig c;
  std::map<std::string, int> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      detail::config_error("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view v = detail::trim(line.substr(eq + 1));
    if (seen[key]++) detail::config_error("duplicate key " + key);

    if (key == "n_agents") c.n_agents = detail::parse_int<int>(key, v);
    else if (key == "omega") c.omega = detail::parse_double(key, v);
    else if (key == "omega0") c.omega0 = detail::parse_double(key, v);
    else if (key == "k_gain") c.k_gain = detail::parse_double(key, v);
    else if (key == "phi") c.phi = detail::parse_double(key, v);
    else if (key == "theta_max") c.theta_max = detail::parse_double(key, v);
    else if (key == "horizon") c.horizon = detail::parse_int<long>(key, v);
    else if (key == "seed") c.seed = detail::parse_int<std::uint64_t>(key, v);
    else if (key == "fault_noise_factor") c.fault_noise_factor = detail::parse_double(key, v);
    else if (key == "pacemaker_index") c.pacemaker_index = detail::parse_int<int>(key, v);
    else if (key == "init") {
      if (v == "sampled") c.init = InitPolicy::kSampled;
      else if (v == "explicit") c.init = InitPolicy::kExplicit;
      else detail::config_error("init must be sampled or explicit");
    } else if (key == "pacemaker") {
      if (v == "random") c.pacemaker_policy = PacemakerPolicy::kSeededRandom;
      else if (v == "fixed") c.pacemaker_policy = PacemakerPolicy::kFixed;
      else detail::config_error("pacemaker must be random or fixed");
    } else if (key == "phases") {
      c.explicit_phases.clear();
      std::string_view rest = v;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        c.explicit_phases.push_back(detail::parse_double(key, detail::trim(rest.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    } else {
      detail::config_error("unknown key " + key);
    }
  }
  return c;
}

inline std::string serialize_config(const SimConfig& c) {
  std::ostringstream os;
  os << "n_agents = " << c.n_agents << '\n'
     << "omega = " << fmt17(c.omega) << '\n'
     << "omega0 = " << fmt17(c.omega0) << '\n'
     << "k_gain = " << fmt17(c.k_gain) << '\n'
     << "phi = " << fmt17(c.phi) << '\n'
     << "theta_max = " << fmt17(c.theta_max) << '\n'
     << "horizon = " << c.horizon << '\n'
     << "seed = " << c.seed << '\n'
     << "init = " << (c.init == InitPolicy::kExplicit ? "explicit" : "sampled") << '\n';
  if (!c.explicit_phases.empty()) {
    os << "phases = ";
    for (std::size_t i = 0; i < c.explicit_phases.size(); ++i) {
      os << (i ? "," : "") << fmt17(c.explicit_phases[i]);
    }
    os << '\n';
  }
  os << "pacemaker = "
     << (c.pacemaker_policy == PacemakerPolicy::kFixed ? "fixed" : "random") << '\n'
     << "pacemaker_index = " << c.pacemaker_index << '\n'
     << "fault_noise_factor = " << fmt17(c.fault_noise_factor) << '\n';
  return os.str();
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) detail::config_error("cannot read " + path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

// Agents are labeled 1..N in column names.
inline std::vector<std::string> trajectory_columns(int n) {
  std::vector<std::string> cols{"k"};
  for (int i = 1; i <= n; ++i) cols.push_back("theta_" + std::to_string(i));
  for (int i = 2; i <= n; ++i) {
    cols.push_back("vartheta_" + std::to_string(i) + "_" + std::to_string(i - 1));
  }
  cols.push_back("vartheta_1_" + std::to_string(n));
  for (int i = 1; i <= n; ++i) cols.push_back("u_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) cols.push_back("indicator_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) {
    cols.push_back("hull_lo_" + std::to_string(i));
    cols.push_back("hull_hi_" + std::to_string(i));
  }
  return cols;
}

inline void write_trajectory_csv(std::ostream& os, std::span<const RoundRecord> traj, int n) {
  const auto cols = trajectory_columns(n);
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  const auto sz = [](int i) { return static_cast<std::size_t>(i); };
  for (const auto& r : traj) {
    os << r.k;
    for (int i = 0; i < n; ++i) os << ',' << fmt17(r.phases[sz(i)]);
    for (int i = 1; i <= n; ++i) {
      const int cur = i % n;
      os << ',' << fmt17(rem(r.phases[sz(cur)] - r.phases[sz(cur == 0 ? n - 1 : cur - 1)]));
    }
    for (int i = 0; i < n; ++i) os << ',' << fmt17(r.controls[sz(i)]);
    for (int i = 0; i < n; ++i) os << ',' << static_cast<int>(r.indicators[sz(i)]);
    for (int i = 0; i < n; ++i) {
      const Interval& h = r.hulls[sz(i)];
      if (h.is_empty()) {
        os << ",nan,nan";
      } else {
        os << ',' << fmt17(h.lo()) << ',' << fmt17(h.hi());
      }
    }
    os << '\n';
  }
}

namespace detail {

template <class T>
nlohmann::ordered_json opt(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json bound_json(const BoundCheck& b) {
  return {{"bound", b.bound}, {"observed", opt(b.observed)}, {"pass", b.pass}};
}

}  // namespace detail

inline nlohmann::ordered_json summary_json(const RunSummary& s) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["status"] = to_string(s.status);
  j["seed"] = s.seed;
  j["generator"] = s.generator;
  j["config"] = {
      {"n_agents", s.config.n_agents},   {"omega", s.config.omega},
      {"omega0", s.config.omega0},       {"k_gain", s.config.k_gain},
      {"phi", s.config.phi},             {"theta_max", s.config.theta_max},
      {"horizon", s.config.horizon},     {"fault_noise_factor", s.config.fault_noise_factor},
  };
  j["psi"] = s.psi;
  j["horizon"] = s.horizon;
  j["steps"] = s.steps;
  j["initial_phases"] = s.initial_phases;
  j["physical_index"] = s.physical_index;

  ordered_json agents = ordered_json::array();
  for (const auto& a : s.agents) {
    agents.push_back({
        {"label", a.index + 1},
        {"pacemaker", a.index == 0},
        {"initial_spacing", a.initial_rel},
        {"final_spacing", a.final_rel},
        {"follower_label", a.follower ? ordered_json(*a.follower + 1) : ordered_json(nullptr)},
        {"k_identified", detail::opt(a.k_identified)},
        {"k_converged", detail::opt(a.k_converged)},
        {"k_range_exit", detail::opt(a.k_range_exit)},
        {"steady_error", a.steady_error},
        {"post_convergence_max_deviation", a.post_conv_max_dev},
        {"soundness_violations", a.soundness_violations},
        {"bias_violations", a.bias_violations},
        {"overtaken", a.overtaken},
    });
  }
  j["agents"] = agents;
  j["closing_gap"] = s.closing_gap;
  j["max_steady_error"] = s.max_steady_error;
  j["epsilon_achieved"] = s.epsilon_achieved;

  ordered_json t4 = ordered_json::object();
  for (std::size_t i = 2; i < s.t4.size(); ++i) {
    if (s.t4[i]) t4[std::to_string(i + 1)] = detail::bound_json(*s.t4[i]);
  }
  j["theorem_bounds"] = {
      {"identification_agent2", detail::bound_json(s.t1)},
      {"convergence_agent2", detail::bound_json(s.t2)},
      {"band_agent2_pass", s.t2_band_pass},
      {"balance_pass", s.t3_pass},
      {"cascade_convergence", t4},
      {"cascade_convergence_pass", s.t4_pass},
  };
  j["cascade_ordered"] = s.cascade_ordered;
  j["stasis_pass"] = s.stasis_pass;
  j["constancy_pass"] = s.constancy_pass;

  ordered_json viol = ordered_json::array();
  for (const auto& v : s.assumptions.violations) viol.push_back({{"clause", v.clause}, {"detail", v.detail}});
  j["assumption_report"] = {{"ok", s.assumptions.ok()}, {"violations", viol}};

  ordered_json diags = ordered_json::array();
  for (const auto& e : s.diagnostics) {
    diags.push_back({{"kind", to_string(e.kind)},
                     {"k", e.k},
                     {"agent_label", e.agent + 1},
                     {"peer_label", e.peer >= 0 ? ordered_json(e.peer + 1) : ordered_json(nullptr)},
                     {"detail", e.detail}});
  }
  j["diagnostics"] = diags;
  j["counters"] = {{"seam_wraps", s.seam_wraps},
                   {"soundness_violations", s.soundness_violations},
                   {"enclosure_violations", s.enclosure_violations},
                   {"bias_violations", s.bias_violations}};
  return j;
}

inline void write_summary_json(std::ostream& os, const RunSummary& s) {
  os << summary_json(s).dump(2) << '\n';
}

inline void write_sweep_csv(std::ostream& os, const SweepTable& t) {
  os << "row,k_mult,phi_mult,k_gain,phi,runs,ok,failed,mean_last_convergence,eta\n";
  for (const auto& c : t.cells) {
    os << "cell," << fmt17(c.k_mult) << ',' << fmt17(c.phi_mult) << ',' << fmt17(c.k_gain) << ','
       << fmt17(c.phi) << ',' << c.runs << ',' << c.ok << ',' << c.failed << ','
       << fmt17(c.ok ? c.mean_last_convergence : std::nan("")) << ','
       << fmt17(c.ok ? c.eta : std::nan("")) << '\n';
  }
  for (const auto& a : t.aggregates) {
    os << "aggregate," << fmt17(a.k_mult) << ",all," << fmt17(a.k_gain) << ",all," << a.runs << ','
       << a.ok << ',' << a.failed << ',' << fmt17(a.ok ? a.mean_last_convergence : std::nan(""))
       << ',' << fmt17(a.ok ? a.eta : std::nan("")) << '\n';
  }
}

}  // namespace circform
