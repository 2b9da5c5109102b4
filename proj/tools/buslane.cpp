// buslane: run the approach simulator, experiment matrices and oracle checks.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "buslane/experiment.hpp"
#include "buslane/time_space.hpp"
#include "buslane/verify.hpp"

namespace fs = std::filesystem;
using namespace buslane;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitInvariant = 2;

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw ParseError("cannot write " + p.string());
  return out;
}

void print_summary(const RunResult& r) {
  fmt::print("strategy {} seed {} fingerprint {:016x}\n", to_string(r.strategy), r.seed,
             r.fingerprint);
  for (TripGroup g : kTripGroups) {
    const auto& m = r.group(g);
    fmt::print("  {:<10} trips {:>5}  delay mean {:7.2f} p50 {:7.2f} p90 {:7.2f} s  "
               "{:7.1f} veh/h  stops {:.2f}\n",
               to_string(g), m.trips, m.mean_delay, m.p50_delay, m.p90_delay, m.throughput_vph,
               m.mean_stops);
  }
  fmt::print("  bus lane use by general traffic {:.3f} veh-km\n", r.bus_lane_general_vkm);
  fmt::print("  spacing violations {}  min spacing {:.2f} m  red violations {}\n",
             r.spacing_violations, r.min_spacing, r.red_violations);
  if (r.audit_checked > 0) {
    fmt::print("  optimized advisories audited {}  failed {}\n", r.audit_checked,
               r.audit_failed);
  }
  fmt::print("  wall {:.2f} s\n", r.wall_seconds);
}

struct SimulateArgs {
  std::string scenario;
  std::string strategy = "dstp";
  std::uint64_t seed = 1;
  std::string traj;
  std::string trips;
};

int cmd_simulate(const SimulateArgs& a) {
  const auto kind = parse_strategy(a.strategy);
  if (!kind) throw ValidationError("strategy", "expected ebl, blidp or dstp");
  const Scenario s = load_scenario(a.scenario);
  std::optional<std::ofstream> traj;
  std::optional<std::ofstream> trips;
  RunOutputs outs;
  if (!a.traj.empty()) outs.trajectory = &traj.emplace(open_out(a.traj));
  if (!a.trips.empty()) outs.trips = &trips.emplace(open_out(a.trips));
  print_summary(run_single(s, *kind, a.seed, outs));
  return 0;
}

struct MatrixArgs {
  std::string config;
  std::string out = "results";
  unsigned jobs = 0;
};

int cmd_matrix(const MatrixArgs& a) {
  const MatrixConfig cfg = load_matrix_config(a.config);
  const unsigned jobs = a.jobs ? a.jobs : std::max(1U, std::thread::hardware_concurrency());
  const auto runs = run_matrix(cfg, jobs, [](std::size_t done, std::size_t total) {
    std::cerr << fmt::format("\r{}/{} runs", done, total) << std::flush;
  });
  std::cerr << '\n';

  const fs::path dir(a.out);
  auto runs_out = open_out(dir / "runs.csv");
  write_runs_csv(runs_out, cfg, runs);
  auto agg_out = open_out(dir / "aggregate.csv");
  write_aggregate_csv(agg_out, cfg, aggregate(cfg, runs));

  int failed = 0;
  for (const auto& r : runs) {
    if (!r.result.ok) {
      ++failed;
      std::cerr << fmt::format("run failed: cell {} {} seed {}: {}\n", cfg.cells[r.cell].label,
                               to_string(r.strategy), r.seed, r.result.error);
    }
  }
  fmt::print("{} runs, {} failed; wrote {} and {}\n", runs.size(), failed,
             (dir / "runs.csv").string(), (dir / "aggregate.csv").string());
  return failed ? kExitInvariant : 0;
}

struct PlotArgs {
  std::string traj;
  int lane = 2;
  std::string out = "time_space.svg";
  std::string scenario;
  std::optional<double> from;
  std::optional<double> to;
};

int cmd_plot(const PlotArgs& a) {
  std::ifstream in(a.traj);
  if (!in) throw ParseError("cannot open " + a.traj);
  const auto rows = read_trajectory(in);
  PlotOptions opts;
  opts.lane = a.lane;
  opts.t_from = a.from;
  opts.t_to = a.to;
  if (!a.scenario.empty()) {
    const Scenario s = load_scenario(a.scenario);
    opts.signal = s.signal;
    opts.stop_bar = s.road.stop_bar();
  }
  auto out = open_out(a.out);
  render_time_space(out, rows, opts);
  fmt::print("wrote {}\n", a.out);
  return 0;
}

struct VerifyArgs {
  std::size_t atg_cases = 1000;
  std::size_t row_cases = 200;
  std::uint64_t seed = 7;
};

int cmd_verify(const VerifyArgs& a) {
  const auto atg = verify_atg(a.atg_cases, a.seed);
  fmt::print("gap windows vs grid reference: {} cases, {} mismatches, {:.3f} s\n", atg.cases,
             atg.mismatches, atg.seconds);
  if (!atg.ok()) fmt::print("  {}\n", atg.first_mismatch);
  const auto row = verify_row_opt(a.row_cases, a.seed, 1, 12);
  fmt::print("branch and bound vs enumeration: {} cases, {} mismatches, slowest {:.2f} ms\n",
             row.cases, row.mismatches, 1e3 * row.max_seconds);
  if (!row.ok()) fmt::print("  {}\n", row.first_mismatch);
  return atg.ok() && row.ok() ? 0 : kExitInvariant;
}

struct CalibrateArgs {
  std::string scenario;
  bool write = false;
};

int cmd_calibrate(const CalibrateArgs& a) {
  Scenario s = load_scenario(a.scenario);
  const double cap = calibrate_capacity(s);
  fmt::print("capacity {:.1f} veh/h\n", cap);
  if (a.write) {
    s.demand.capacity_vph = cap;
    save_scenario(s, a.scenario);
    fmt::print("updated {}\n", a.scenario);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bus-lane sharing simulator and experiment runner"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one seeded simulation");
  simulate->add_option("--scenario", sim.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--strategy", sim.strategy, "ebl, blidp or dstp");
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--traj", sim.traj, "Trajectory CSV output");
  simulate->add_option("--trips", sim.trips, "Trip CSV output");

  MatrixArgs mx;
  auto* matrix = app.add_subcommand("matrix", "Run an experiment matrix");
  matrix->add_option("--config", mx.config, "Matrix JSON")->required()->check(CLI::ExistingFile);
  matrix->add_option("--out", mx.out, "Output directory");
  matrix->add_option("--jobs", mx.jobs, "Worker threads (0: all cores)");

  PlotArgs pl;
  auto* plot = app.add_subcommand("plot", "Render a time-space diagram");
  plot->add_option("--traj", pl.traj, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--lane", pl.lane, "Lane index");
  plot->add_option("--out", pl.out, "SVG output");
  plot->add_option("--scenario", pl.scenario, "Scenario JSON for the signal plan");
  plot->add_option("--from", pl.from, "Start time (s)");
  plot->add_option("--to", pl.to, "End time (s)");

  VerifyArgs vf;
  auto* verify = app.add_subcommand("verify", "Check solvers against their references");
  verify->add_option("--atg-cases", vf.atg_cases);
  verify->add_option("--row-cases", vf.row_cases);
  verify->add_option("--seed", vf.seed);

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "Measure stop-bar capacity");
  calibrate->add_option("--scenario", cal.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  calibrate->add_flag("--write", cal.write, "Store the result in the scenario file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitValidation;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*matrix) return cmd_matrix(mx);
    if (*plot) return cmd_plot(pl);
    if (*verify) return cmd_verify(vf);
    if (*calibrate) return cmd_calibrate(cal);
  } catch (const InvariantBreach& e) {
    std::cerr << "invariant breach: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const EmptySelection& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
