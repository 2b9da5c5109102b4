#include "buslane/experiment.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>
#include "json.hpp"

namespace buslane {

using json = nlohmann::json;

namespace {

// Only the road, signal, vehicles, class mix and run length matter to the
// calibration run; everything else is reset so equal setups share a result.
Scenario calibration_setup(const Scenario& s) {
  Scenario c = s;
  c.demand.right_turn_ratio = 0.0;
  c.demand.vc_ratio = 1.0;
  c.demand.seed = 1;
  c.demand.capacity_vph.reset();
  c.road.bus_stop_pos.reset();
  c.demand.bus_headway_mean = DemandSpec{}.bus_headway_mean;
  c.demand.bus_headway_std = DemandSpec{}.bus_headway_std;
  c.demand.dwell_mean = DemandSpec{}.dwell_mean;
  c.demand.dwell_std = DemandSpec{}.dwell_std;
  return c;
}

}  // namespace

double calibrate_capacity(const Scenario& s) {
  const Scenario c = calibration_setup(s);
  EblController ebl(c);
  SimOptions opts;
  opts.spawn_buses = false;
  opts.saturated_entry = true;
  Simulation sim(c, ebl, opts);
  sim.run();
  int crossed = 0;
  for (const auto& t : sim.trips()) {
    if (t.exit_s >= c.demand.warmup) ++crossed;
  }
  const double hours = (c.demand.sim_duration - c.demand.warmup) / 3600.0;
  return std::round(10.0 * crossed / hours) / 10.0;
}

Scenario ensure_capacity(Scenario s) {
  if (s.demand.capacity_vph) return s;
  static std::mutex mu;
  static std::map<std::uint64_t, double> cache;
  const std::uint64_t key = fingerprint(calibration_setup(s));
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) {
      s.demand.capacity_vph = it->second;
      return s;
    }
  }
  const double cap = calibrate_capacity(s);
  {
    std::lock_guard lock(mu);
    cache.emplace(key, cap);
  }
  s.demand.capacity_vph = cap;
  return s;
}

RunResult run_single(const Scenario& base, StrategyKind strategy, std::uint64_t seed,
                     const RunOutputs& outputs) {
  Scenario s = ensure_capacity(base);
  s.demand.seed = seed;
  auto controller = make_controller(ControllerConfig::defaults(strategy, s), s);

  SimOptions opts;
  opts.trajectory = outputs.trajectory;
  if (outputs.trajectory) *outputs.trajectory << kTrajectoryHeader << '\n';

  const auto start = std::chrono::steady_clock::now();
  Simulation sim(s, *controller, opts);
  sim.run();
  RunResult r = summarize(sim, strategy, dynamic_cast<const DstpController*>(controller.get()));
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (outputs.trips) write_trip_csv(*outputs.trips, sim.trips(), s);
  return r;
}

Scenario CellSpec::apply(const Scenario& base) const {
  Scenario s = base;
  if (vc_ratio) s.demand.vc_ratio = *vc_ratio;
  if (cpr) s.demand.cpr = *cpr;
  if (bus_headway_mean) s.demand.bus_headway_mean = *bus_headway_mean;
  if (right_turn_ratio) s.demand.right_turn_ratio = *right_turn_ratio;
  if (bus_stop_pos) s.road.bus_stop_pos = *bus_stop_pos;
  if (sim_duration) s.demand.sim_duration = *sim_duration;
  return s;
}

namespace {

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

CellSpec parse_cell(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  CellSpec c;
  for (const auto& [key, value] : j.items()) {
    const std::string at = where + "." + key;
    if (key == "label") {
      if (!value.is_string()) throw ParseError(at + ": expected a string");
      c.label = value.get<std::string>();
    } else if (key == "vc_ratio") {
      c.vc_ratio = number_at(value, at);
    } else if (key == "cpr") {
      c.cpr = number_at(value, at);
    } else if (key == "bus_headway_mean") {
      c.bus_headway_mean = number_at(value, at);
    } else if (key == "right_turn_ratio") {
      c.right_turn_ratio = number_at(value, at);
    } else if (key == "sim_duration") {
      c.sim_duration = number_at(value, at);
    } else if (key == "bus_stop_pos") {
      c.bus_stop_pos = value.is_null() ? std::optional<double>{} : number_at(value, at);
    } else {
      throw ParseError(at + ": unknown key");
    }
  }
  return c;
}

std::string level_text(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string("none");
}

std::string default_label(const CellSpec& c, const Scenario& s) {
  return fmt::format("vc{}_cpr{}_hw{}_rt{}_stop{}", s.demand.vc_ratio, s.demand.cpr,
                     s.demand.bus_headway_mean, s.demand.right_turn_ratio,
                     level_text(s.road.bus_stop_pos));
  (void)c;
}

}  // namespace

MatrixConfig parse_matrix_config(const std::string& json_text,
                                 const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("matrix config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("matrix config: expected an object");

  MatrixConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key != "scenario" && key != "strategies" && key != "seeds" && key != "cells" &&
        key != "grid") {
      throw ParseError(key + ": unknown key");
    }
  }
  if (!j.contains("scenario")) throw ParseError("scenario: missing");
  const json& sc = j["scenario"];
  if (sc.is_string()) {
    cfg.base = load_scenario(base_dir / sc.get<std::string>());
  } else if (sc.is_object()) {
    cfg.base = parse_scenario(sc.dump());
  } else {
    throw ParseError("scenario: expected a path or an object");
  }

  const json strategies = j.value("strategies", json::array({"ebl", "blidp", "dstp"}));
  if (!strategies.is_array() || strategies.empty()) {
    throw ParseError("strategies: expected a non-empty array");
  }
  for (const auto& s : strategies) {
    const auto k = s.is_string() ? parse_strategy(s.get<std::string>()) : std::nullopt;
    if (!k) throw ParseError("strategies: unknown strategy " + s.dump());
    cfg.strategies.push_back(*k);
  }

  const json seeds = j.value("seeds", json::array({1, 2, 3, 4, 5}));
  if (!seeds.is_array() || seeds.empty()) throw ParseError("seeds: expected a non-empty array");
  for (const auto& s : seeds) {
    if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
      throw ParseError("seeds: expected unsigned integers");
    }
    cfg.seeds.push_back(s.get<std::uint64_t>());
  }

  if (j.contains("cells")) {
    if (!j["cells"].is_array()) throw ParseError("cells: expected an array");
    for (std::size_t i = 0; i < j["cells"].size(); ++i) {
      cfg.cells.push_back(parse_cell(j["cells"][i], fmt::format("cells[{}]", i)));
    }
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) throw ParseError("grid: expected an object");
    std::vector<CellSpec> product{CellSpec{}};
    for (const auto& [key, levels] : g.items()) {
      if (!levels.is_array() || levels.empty()) {
        throw ParseError("grid." + key + ": expected a non-empty array");
      }
      std::vector<CellSpec> next;
      for (const auto& cell : product) {
        for (const auto& level : levels) {
          json one = json::object();
          one[key] = level;
          CellSpec add = parse_cell(one, "grid");
          CellSpec merged = cell;
          if (add.vc_ratio) merged.vc_ratio = add.vc_ratio;
          if (add.cpr) merged.cpr = add.cpr;
          if (add.bus_headway_mean) merged.bus_headway_mean = add.bus_headway_mean;
          if (add.right_turn_ratio) merged.right_turn_ratio = add.right_turn_ratio;
          if (add.bus_stop_pos) merged.bus_stop_pos = add.bus_stop_pos;
          if (add.sim_duration) merged.sim_duration = add.sim_duration;
          if (!add.label.empty()) throw ParseError("grid: label is not a factor");
          next.push_back(merged);
        }
      }
      product = std::move(next);
    }
    cfg.cells.insert(cfg.cells.end(), product.begin(), product.end());
  }
  if (cfg.cells.empty()) cfg.cells.push_back(CellSpec{});

  for (auto& c : cfg.cells) {
    const Scenario s = c.apply(cfg.base);
    validate(s);
    if (c.label.empty()) c.label = default_label(c, s);
  }
  return cfg;
}

MatrixConfig load_matrix_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_matrix_config(buf.str(), path.parent_path());
}

std::vector<MatrixRun> run_matrix(const MatrixConfig& config, unsigned jobs,
                                  const ProgressFn& progress) {
  const Scenario base = ensure_capacity(config.base);

  std::vector<MatrixRun> runs;
  for (std::size_t c = 0; c < config.cells.size(); ++c) {
    for (StrategyKind k : config.strategies) {
      for (std::uint64_t seed : config.seeds) runs.push_back({c, k, seed, {}});
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      MatrixRun& run = runs[i];
      Scenario s = config.cells[run.cell].apply(base);
      try {
        run.result = run_single(s, run.strategy, run.seed);
      } catch (const std::exception& e) {
        run.result = RunResult{};
        run.result.strategy = run.strategy;
        run.result.seed = run.seed;
        run.result.fingerprint = fingerprint(s);
        run.result.ok = false;
        run.result.error = e.what();
      }
      const std::size_t n = ++done;
      if (progress) {
        std::lock_guard lock(progress_mu);
        progress(n, runs.size());
      }
    }
  };

  const unsigned threads = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(runs.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  return runs;
}

namespace {

struct MetricDef {
  std::string name;
  std::function<double(const RunResult&)> get;
};

std::vector<MetricDef> metric_defs() {
  std::vector<MetricDef> defs;
  for (TripGroup g : kTripGroups) {
    const std::string p(to_string(g));
    const auto gi = static_cast<std::size_t>(g);
    defs.push_back({p + "_mean_delay_s", [gi](const RunResult& r) { return r.groups[gi].mean_delay; }});
    defs.push_back({p + "_p90_delay_s", [gi](const RunResult& r) { return r.groups[gi].p90_delay; }});
    defs.push_back({p + "_throughput_vph",
                    [gi](const RunResult& r) { return r.groups[gi].throughput_vph; }});
    defs.push_back({p + "_mean_stops", [gi](const RunResult& r) { return r.groups[gi].mean_stops; }});
    defs.push_back({p + "_proxy_energy",
                    [gi](const RunResult& r) { return r.groups[gi].proxy_energy; }});
  }
  defs.push_back({"bus_lane_general_vkm", [](const RunResult& r) { return r.bus_lane_general_vkm; }});
  defs.push_back({"spacing_violations",
                  [](const RunResult& r) { return static_cast<double>(r.spacing_violations); }});
  defs.push_back({"red_violations",
                  [](const RunResult& r) { return static_cast<double>(r.red_violations); }});
  return defs;
}

double t_critical(std::size_t n) {
  if (n < 2) return 0.0;
  boost::math::students_t dist(static_cast<double>(n - 1));
  return boost::math::quantile(boost::math::complement(dist, 0.025));
}

std::string cell_columns(const MatrixConfig& config, std::size_t cell) {
  const Scenario s = config.cells[cell].apply(config.base);
  return fmt::format("{},{},{},{},{},{}", config.cells[cell].label, s.demand.vc_ratio, s.demand.cpr,
                     s.demand.bus_headway_mean, s.demand.right_turn_ratio,
                     level_text(s.road.bus_stop_pos));
}

}  // namespace

std::vector<Aggregate> aggregate(const MatrixConfig& config, std::span<const MatrixRun> runs) {
  std::vector<Aggregate> out;
  const auto defs = metric_defs();
  for (std::size_t c = 0; c < config.cells.size(); ++c) {
    for (StrategyKind k : config.strategies) {
      std::vector<const RunResult*> ok;
      for (const auto& r : runs) {
        if (r.cell == c && r.strategy == k && r.result.ok) ok.push_back(&r.result);
      }
      for (const auto& def : defs) {
        Aggregate a{c, k, def.name, ok.size(), 0.0, 0.0};
        if (!ok.empty()) {
          double sum = 0.0;
          for (const RunResult* r : ok) sum += def.get(*r);
          a.mean = sum / static_cast<double>(ok.size());
          if (ok.size() > 1) {
            double ss = 0.0;
            for (const RunResult* r : ok) ss += (def.get(*r) - a.mean) * (def.get(*r) - a.mean);
            const double sd = std::sqrt(ss / static_cast<double>(ok.size() - 1));
            a.ci95 = t_critical(ok.size()) * sd / std::sqrt(static_cast<double>(ok.size()));
          }
        }
        out.push_back(std::move(a));
      }
    }
  }
  return out;
}

const Aggregate* find_aggregate(std::span<const Aggregate> table, std::size_t cell,
                                StrategyKind strategy, std::string_view metric) {
  for (const auto& a : table) {
    if (a.cell == cell && a.strategy == strategy && a.metric == metric) return &a;
  }
  return nullptr;
}

void write_runs_csv(std::ostream& out, const MatrixConfig& config,
                    std::span<const MatrixRun> runs) {
  out << "label,vc_ratio,cpr,bus_headway_mean,right_turn_ratio,bus_stop_pos,strategy,seed,"
         "fingerprint,status";
  for (TripGroup g : kTripGroups) {
    const auto p = to_string(g);
    out << fmt::format(",{0}_trips,{0}_mean_delay_s,{0}_p50_delay_s,{0}_p90_delay_s,"
                       "{0}_throughput_vph,{0}_mean_stops,{0}_proxy_energy",
                       p);
  }
  out << ",bus_lane_general_vkm,spacing_violations,min_spacing_m,red_violations,"
         "optimized_advisories,audit_checked,audit_failed,error\n";
  for (const auto& run : runs) {
    const RunResult& r = run.result;
    out << fmt::format("{},{},{},{:016x},{}", cell_columns(config, run.cell), to_string(run.strategy),
                       run.seed, r.fingerprint, r.ok ? "ok" : "failed");
    for (const auto& g : r.groups) {
      out << fmt::format(",{},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f}", g.trips, g.mean_delay,
                         g.p50_delay, g.p90_delay, g.throughput_vph, g.mean_stops, g.proxy_energy);
    }
    const auto opt = r.advisories.find(AdvisoryKind::ThroughOptimized);
    std::string error = r.error;
    for (char& ch : error) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << fmt::format(",{:.4f},{},{:.4f},{},{},{},{},{}\n", r.bus_lane_general_vkm,
                       r.spacing_violations, r.ok ? r.min_spacing : 0.0, r.red_violations,
                       opt == r.advisories.end() ? 0 : opt->second, r.audit_checked,
                       r.audit_failed, error);
  }
}

void write_aggregate_csv(std::ostream& out, const MatrixConfig& config,
                         std::span<const Aggregate> table) {
  out << "label,vc_ratio,cpr,bus_headway_mean,right_turn_ratio,bus_stop_pos,strategy,metric,n,"
         "mean,ci95\n";
  for (const auto& a : table) {
    out << fmt::format("{},{},{},{},{:.4f},{:.4f}\n", cell_columns(config, a.cell),
                       to_string(a.strategy), a.metric, a.n, a.mean, a.ci95);
  }
}

}  // namespace buslane
