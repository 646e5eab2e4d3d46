#pragma once

// Command-line front end: run, sweep and verify.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "circform/config.hpp"
#include "circform/error.hpp"
#include "circform/io.hpp"
#include "circform/kinematics.hpp"
#include "circform/monte_carlo.hpp"
#include "circform/run.hpp"
#include "circform/verify.hpp"

namespace circform::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidConfig = 2,
  kExitDiagnostic = 3,
  kExitAssertion = 4,
};

inline constexpr const char* kOutDirEnv = "CIRCFORM_OUT_DIR";
inline constexpr const char* kDefaultOutDir = "circform-out";

inline std::string default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? env : kDefaultOutDir;
}

// Flag overrides on top of an optional config file.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<double> omega;
  std::optional<double> omega0;
  std::optional<double> k;
  std::optional<double> phi;
  std::optional<double> theta_max;
  std::optional<long> horizon;
  std::optional<int> pacemaker;
  std::vector<double> phases;
  std::optional<double> noise_factor;

  void attach(CLI::App& app, bool grid_only = false) {
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--seed", seed, "base seed");
    app.add_option("--n", n, "number of agents");
    app.add_option("--omega0", omega0, "pacemaker speed (rad/step)");
    app.add_option("--theta-max", theta_max, "detecting distance (rad)");
    app.add_option("--horizon", horizon, "step limit, 0 = automatic");
    if (grid_only) return;
    app.add_option("--omega", omega, "common drift (rad/step)");
    app.add_option("--k", k, "control gain K (rad/step)");
    app.add_option("--phi", phi, "noise bound (rad)");
    app.add_option("--pacemaker", pacemaker, "fixed pacemaker position index");
    app.add_option("--phases", phases, "explicit initial phases (rad)")->delimiter(',');
    app.add_option("--noise-factor", noise_factor, "noise drawn at this multiple of phi");
  }

  SimConfig resolve() const {
    SimConfig c = config_path.empty() ? SimConfig{} : load_config(config_path);
    if (seed) c.seed = *seed;
    if (n) c.n_agents = *n;
    if (omega) c.omega = *omega;
    if (omega0) c.omega0 = *omega0;
    if (k) c.k_gain = *k;
    if (phi) c.phi = *phi;
    if (theta_max) c.theta_max = *theta_max;
    if (horizon) c.horizon = *horizon;
    if (pacemaker) {
      c.pacemaker_policy = PacemakerPolicy::kFixed;
      c.pacemaker_index = *pacemaker;
    }
    if (!phases.empty()) {
      c.init = InitPolicy::kExplicit;
      c.explicit_phases = phases;
    }
    if (noise_factor) c.fault_noise_factor = *noise_factor;
    return c;
  }
};

struct Display {
  bool degrees = false;
  std::string angle(double rad) const {
    std::ostringstream os;
    os << std::setprecision(6) << (degrees ? rad * 180.0 / kPi : rad) << (degrees ? " deg" : "");
    return os.str();
  }
};

inline std::filesystem::path prepare_out_dir(const std::string& flag) {
  std::filesystem::path dir = flag.empty() ? default_out_dir() : flag;
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + p.string());
  f << body;
}

inline std::string opt_str(const std::optional<long>& v) { return v ? std::to_string(*v) : "-"; }

inline void print_summary(std::ostream& out, const RunSummary& s, const Display& d) {
  out << "status " << to_string(s.status) << "  N=" << s.config.n_agents << "  seed=" << s.seed
      << "  steps=" << s.steps << "  psi=" << d.angle(s.psi) << '\n';
  out << "label  follower  k_id  k_conv  steady_error\n";
  for (std::size_t i = 1; i < s.agents.size(); ++i) {
    const auto& a = s.agents[i];
    out << std::setw(5) << i + 1 << std::setw(10)
        << (a.follower ? std::to_string(*a.follower + 1) : "-") << std::setw(6)
        << opt_str(a.k_identified) << std::setw(8) << opt_str(a.k_converged) << "  "
        << d.angle(a.steady_error) << '\n';
  }
  out << "closing gap " << d.angle(s.closing_gap) << ", epsilon achieved "
      << d.angle(s.epsilon_achieved) << '\n';
  auto line = [&out](const char* name, const BoundCheck& b) {
    out << name << ": observed " << opt_str(b.observed) << " <= bound " << b.bound << "  "
        << (b.pass ? "pass" : "FAIL") << '\n';
  };
  line("agent 2 identification", s.t1);
  line("agent 2 convergence", s.t2);
  out << "agent 2 band |spacing - psi| <= K: " << (s.t2_band_pass ? "pass" : "FAIL") << '\n';
  out << "balance (steady <= K, closing <= (N-1)K): " << (s.t3_pass ? "pass" : "FAIL") << '\n';
  out << "cascade convergence bounds: " << (s.t4_pass ? "pass" : "FAIL") << '\n';
  for (const auto& e : s.diagnostics) {
    out << "diagnostic " << to_string(e.kind) << " k=" << e.k << " agent " << e.agent + 1 << ": "
        << e.detail << '\n';
  }
}

inline int cmd_run(const ConfigFlags& flags, const std::string& out_dir, const Display& d,
                   std::ostream& out) {
  const SimConfig c = flags.resolve();
  const RunResult r = run(c, true);
  const auto dir = prepare_out_dir(out_dir);

  std::ostringstream traj;
  write_trajectory_csv(traj, r.trajectory, c.n_agents);
  write_file(dir / "trajectory.csv", traj.str());
  std::ostringstream summary;
  write_summary_json(summary, r.summary);
  write_file(dir / "summary.json", summary.str());
  write_file(dir / "config.txt", serialize_config(c));

  print_summary(out, r.summary, d);
  out << "wrote " << (dir / "trajectory.csv").string() << ", " << (dir / "summary.json").string()
      << '\n';
  if (r.summary.status == RunStatus::kDiagnostic) return kExitDiagnostic;
  if (r.summary.status == RunStatus::kNotConverged || !r.summary.theorems_pass()) {
    return kExitAssertion;
  }
  return kExitOk;
}

struct SweepFlags {
  std::vector<double> k_mults{1, 2, 3, 4};
  std::vector<double> phi_mults{2, 3, 4, 5};
  int runs = 100;
  unsigned threads = 0;
};

inline int cmd_sweep(const ConfigFlags& flags, const SweepFlags& sf, const std::string& out_dir,
                     std::ostream& out) {
  SweepGrid g;
  g.base = flags.resolve();
  g.base_seed = g.base.seed;
  g.k_mults = sf.k_mults;
  g.phi_mults = sf.phi_mults;
  g.runs = sf.runs;
  g.threads = sf.threads;
  const SweepTable t = monte_carlo(g);
  const auto dir = prepare_out_dir(out_dir);
  std::ostringstream csv;
  write_sweep_csv(csv, t);
  write_file(dir / "sweep.csv", csv.str());

  out << "K/omega0  runs  ok  mean k_N^c  eta\n";
  for (const auto& a : t.aggregates) {
    out << std::setw(8) << a.k_mult << std::setw(6) << a.runs << std::setw(4) << a.ok
        << std::setw(12) << std::fixed << std::setprecision(1) << a.mean_last_convergence
        << std::defaultfloat << std::setprecision(4) << "  " << a.eta << '\n';
  }
  for (const auto& f : t.failures) out << "failed: " << f << '\n';
  out << "wrote " << (dir / "sweep.csv").string() << '\n';
  return t.failures.empty() ? kExitOk : kExitDiagnostic;
}

inline int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  const VerifyReport r = verify(o);
  out << "runs " << r.runs << (o.inject_fault ? " (fault injected)" : "") << '\n';
  for (Check c : kAllChecks) {
    const auto& t = r.at(c);
    out << std::left << std::setw(14) << to_string(c) << std::right << " passed "
        << t.checked - t.failed << "/" << t.checked << '\n';
  }
  for (const auto& f : r.failures) out << f << '\n';
  out << "violations " << r.violations() << '\n';
  if (r.ok()) return kExitOk;
  return r.has_diagnostic_failure() ? kExitDiagnostic : kExitAssertion;
}

// Parses argv and dispatches; every failure maps to an exit code.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized circular-formation balancing simulator"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  std::string run_out;
  Display run_display;
  CLI::App* run_cmd = app.add_subcommand("run", "simulate one configuration");
  run_flags.attach(*run_cmd);
  run_cmd->add_option("--out-dir", run_out, "output directory");
  run_cmd->add_flag("--degrees", run_display.degrees, "print angles in degrees");

  ConfigFlags sweep_flags;
  SweepFlags sweep_opts;
  std::string sweep_out;
  bool sweep_degrees = false;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over K and phi");
  sweep_flags.attach(*sweep_cmd, true);
  sweep_cmd->add_option("--runs", sweep_opts.runs, "runs per cell");
  sweep_cmd->add_option("--k-mults", sweep_opts.k_mults, "K values as multiples of omega0")
      ->delimiter(',');
  sweep_cmd->add_option("--phi-mults", sweep_opts.phi_mults, "phi values as multiples of K")
      ->delimiter(',');
  sweep_cmd->add_option("--threads", sweep_opts.threads, "worker threads, 0 = all cores");
  sweep_cmd->add_option("--out-dir", sweep_out, "output directory");
  sweep_cmd->add_flag("--degrees", sweep_degrees, "accepted for symmetry; the table has no angles");

  VerifyOptions vo;
  std::optional<int> verify_n;
  CLI::App* verify_cmd = app.add_subcommand("verify", "randomized assertion battery");
  verify_cmd->add_option("--runs", vo.runs, "number of randomized runs");
  verify_cmd->add_option("--n", verify_n, "fix the agent count");
  verify_cmd->add_option("--n-min", vo.n_min, "smallest agent count");
  verify_cmd->add_option("--n-max", vo.n_max, "largest agent count");
  verify_cmd->add_option("--seed", vo.seed, "sampler seed");
  verify_cmd->add_flag("--inject-fault", vo.inject_fault, "draw noise beyond the assumed bound");
  verify_cmd->add_option("--threads", vo.threads, "worker threads, 0 = all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags, run_out, run_display, out);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, sweep_opts, sweep_out, out);
    if (verify_n) vo.n_min = vo.n_max = *verify_n;
    return cmd_verify(vo, out);
  } catch (const InvalidConfig& e) {
    err << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const InfeasibleInit& e) {
    err << "infeasible initial condition: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDiagnostic;
  }
}

}  // namespace circform::cli
