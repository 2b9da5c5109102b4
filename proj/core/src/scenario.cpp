#include "buslane/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "buslane/types.hpp"
#include "json.hpp"

namespace buslane {
namespace {

using nlohmann::json;

template <typename T>
struct Field {
  const char* name;
  double T::*member;
};

constexpr Field<RoadConfig> kRoadDoubles[] = {
    {"control_zone_len", &RoadConfig::control_zone_len},
    {"no_change_zone_len", &RoadConfig::no_change_zone_len},
    {"right_turn_pocket_len", &RoadConfig::right_turn_pocket_len},
    {"right_turn_fallback_dist", &RoadConfig::right_turn_fallback_dist},
    {"speed_limit", &RoadConfig::speed_limit},
};

constexpr Field<SignalPlan> kSignalDoubles[] = {
    {"cycle", &SignalPlan::cycle},
    {"red", &SignalPlan::red},
    {"green", &SignalPlan::green},
};

constexpr Field<VehiclePopulation> kVehicleDoubles[] = {
    {"car_len", &VehiclePopulation::car_len},
    {"bus_len", &VehiclePopulation::bus_len},
    {"car_accel", &VehiclePopulation::car_accel},
    {"car_decel", &VehiclePopulation::car_decel},
    {"bus_accel", &VehiclePopulation::bus_accel},
    {"bus_decel", &VehiclePopulation::bus_decel},
    {"emergency_decel", &VehiclePopulation::emergency_decel},
    {"tau_c", &VehiclePopulation::tau_c},
    {"tau_a", &VehiclePopulation::tau_a},
    {"tau_h", &VehiclePopulation::tau_h},
    {"eps_c", &VehiclePopulation::eps_c},
    {"eps_a", &VehiclePopulation::eps_a},
    {"eps_h", &VehiclePopulation::eps_h},
    {"startup_lost_time", &VehiclePopulation::startup_lost_time},
    {"lateral_comfort_decel", &VehiclePopulation::lateral_comfort_decel},
    {"lateral_safe_gap", &VehiclePopulation::lateral_safe_gap},
    {"asg_margin_front", &VehiclePopulation::asg_margin_front},
    {"asg_margin_rear", &VehiclePopulation::asg_margin_rear},
    {"min_gap_human", &VehiclePopulation::min_gap_human},
    {"min_gap_automated", &VehiclePopulation::min_gap_automated},
    {"krauss_sigma", &VehiclePopulation::krauss_sigma},
};

constexpr Field<DemandSpec> kDemandDoubles[] = {
    {"vc_ratio", &DemandSpec::vc_ratio},
    {"cpr", &DemandSpec::cpr},
    {"cav_chv_split", &DemandSpec::cav_chv_split},
    {"right_turn_ratio", &DemandSpec::right_turn_ratio},
    {"bus_headway_mean", &DemandSpec::bus_headway_mean},
    {"bus_headway_std", &DemandSpec::bus_headway_std},
    {"dwell_mean", &DemandSpec::dwell_mean},
    {"dwell_std", &DemandSpec::dwell_std},
    {"sim_duration", &DemandSpec::sim_duration},
    {"warmup", &DemandSpec::warmup},
    {"control_interval", &DemandSpec::control_interval},
    {"sim_dt", &DemandSpec::sim_dt},
};

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + ": expected a number");
  return v.get<double>();
}

const json& section(const json& root, const char* key) {
  auto it = root.find(key);
  if (it == root.end()) throw ParseError(std::string("missing top-level section \"") + key + "\"");
  if (!it->is_object()) throw ParseError(std::string(key) + ": expected an object");
  return *it;
}

void reject_unknown(const json& obj, const std::string& prefix,
                    const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) throw ParseError(prefix + "." + it.key() + ": unknown key");
  }
}

template <typename T, std::size_t N>
void read_doubles(const json& obj, const std::string& prefix, const Field<T> (&fields)[N],
                  T& out, std::set<std::string>& known) {
  for (const auto& f : fields) {
    known.insert(f.name);
    if (auto it = obj.find(f.name); it != obj.end()) {
      out.*(f.member) = as_number(*it, prefix + "." + f.name);
    }
  }
}

template <typename T, std::size_t N>
void write_doubles(json& obj, const Field<T> (&fields)[N], const T& in) {
  for (const auto& f : fields) obj[f.name] = in.*(f.member);
}

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

bool is_multiple(double value, double step) {
  const double r = value / step;
  return std::abs(r - std::round(r)) < 1e-9;
}

bool unit_fraction(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void validate(const Scenario& s) {
  const auto& r = s.road;
  require(r.control_zone_len > 0, "road.control_zone_len", "must be positive");
  require(r.no_change_zone_len > 0 && r.no_change_zone_len < r.control_zone_len,
          "road.no_change_zone_len", "must satisfy 0 < no_change_zone_len < control_zone_len");
  if (r.bus_stop_pos) {
    require(*r.bus_stop_pos > 0 && *r.bus_stop_pos < r.no_change_boundary(), "road.bus_stop_pos",
            "must lie strictly between the entry and the no-change zone");
  }
  require(r.right_turn_pocket_len > r.no_change_zone_len &&
              r.right_turn_pocket_len < r.control_zone_len,
          "road.right_turn_pocket_len",
          "must be longer than the no-change zone and shorter than the control zone");
  require(r.lane_count_main >= 2, "road.lane_count_main", "needs at least one general lane");
  require(r.bus_lane_index == r.lane_count_main - 1, "road.bus_lane_index",
          "bus lane must be the rightmost main lane (lane_count_main - 1)");
  require(r.right_turn_fallback_dist > 0 && r.right_turn_fallback_dist < r.control_zone_len,
          "road.right_turn_fallback_dist", "must be in (0, control_zone_len)");
  require(r.speed_limit > 0, "road.speed_limit", "must be positive");

  const auto& g = s.signal;
  require(g.red > 0, "signal.red", "must be positive");
  require(g.green > 0, "signal.green", "must be positive");
  require(std::abs(g.cycle - (g.red + g.green)) < 1e-9, "signal.cycle",
          "cycle must equal red + green");

  const auto& v = s.vehicles;
  struct Positive {
    const char* name;
    double value;
  };
  const Positive positives[] = {
      {"vehicles.car_len", v.car_len},
      {"vehicles.bus_len", v.bus_len},
      {"vehicles.car_accel", v.car_accel},
      {"vehicles.car_decel", v.car_decel},
      {"vehicles.bus_accel", v.bus_accel},
      {"vehicles.bus_decel", v.bus_decel},
      {"vehicles.emergency_decel", v.emergency_decel},
      {"vehicles.tau_c", v.tau_c},
      {"vehicles.tau_a", v.tau_a},
      {"vehicles.tau_h", v.tau_h},
      {"vehicles.eps_c", v.eps_c},
      {"vehicles.eps_a", v.eps_a},
      {"vehicles.eps_h", v.eps_h},
      {"vehicles.startup_lost_time", v.startup_lost_time},
      {"vehicles.lateral_comfort_decel", v.lateral_comfort_decel},
      {"vehicles.lateral_safe_gap", v.lateral_safe_gap},
      {"vehicles.asg_margin_front", v.asg_margin_front},
      {"vehicles.asg_margin_rear", v.asg_margin_rear},
      {"vehicles.min_gap_human", v.min_gap_human},
      {"vehicles.min_gap_automated", v.min_gap_automated},
  };
  for (const auto& p : positives) require(p.value > 0, p.name, "must be strictly positive");
  require(v.tau_c <= v.tau_a, "vehicles.tau_a", "requires tau_c <= tau_a");
  require(v.tau_a <= v.tau_h, "vehicles.tau_h", "requires tau_a <= tau_h");
  require(unit_fraction(v.krauss_sigma), "vehicles.krauss_sigma", "must be in [0, 1]");
  require(v.emergency_decel >= v.car_decel && v.emergency_decel >= v.bus_decel,
          "vehicles.emergency_decel", "must be at least the comfortable decelerations");

  const auto& d = s.demand;
  require(d.vc_ratio >= 0, "demand.vc_ratio", "must be non-negative");
  require(unit_fraction(d.cpr), "demand.cpr", "must be in [0, 1]");
  require(unit_fraction(d.cav_chv_split), "demand.cav_chv_split", "must be in [0, 1]");
  require(unit_fraction(d.right_turn_ratio), "demand.right_turn_ratio", "must be in [0, 1]");
  require(d.bus_headway_mean > 0, "demand.bus_headway_mean", "must be positive");
  require(d.bus_headway_std >= 0, "demand.bus_headway_std", "must be non-negative");
  require(d.dwell_mean >= 0, "demand.dwell_mean", "must be non-negative");
  require(d.dwell_std >= 0, "demand.dwell_std", "must be non-negative");
  require(d.sim_dt > 0, "demand.sim_dt", "must be positive");
  require(d.control_interval > 0 && is_multiple(d.control_interval, d.sim_dt),
          "demand.control_interval", "must be a positive multiple of sim_dt");
  require(d.sim_duration > 0, "demand.sim_duration", "must be positive");
  require(d.warmup >= 0 && d.warmup < d.sim_duration, "demand.warmup",
          "must satisfy 0 <= warmup < sim_duration");
  if (d.capacity_vph) require(*d.capacity_vph > 0, "demand.capacity_vph", "must be positive");
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("scenario must be a JSON object");
  reject_unknown(root, "scenario", {"road", "signal", "vehicles", "demand"});

  Scenario s;

  const json& road = section(root, "road");
  std::set<std::string> known;
  read_doubles(road, "road", kRoadDoubles, s.road, known);
  for (const char* key : {"lane_count_main", "bus_lane_index"}) {
    known.insert(key);
    if (auto it = road.find(key); it != road.end()) {
      if (!it->is_number_integer()) throw ParseError(std::string("road.") + key + ": expected an integer");
      (std::string_view(key) == "lane_count_main" ? s.road.lane_count_main : s.road.bus_lane_index) =
          it->get<int>();
    }
  }
  known.insert("bus_stop_pos");
  if (auto it = road.find("bus_stop_pos"); it != road.end() && !it->is_null()) {
    s.road.bus_stop_pos = as_number(*it, "road.bus_stop_pos");
  }
  reject_unknown(road, "road", known);

  const json& signal = section(root, "signal");
  known.clear();
  read_doubles(signal, "signal", kSignalDoubles, s.signal, known);
  reject_unknown(signal, "signal", known);
  const bool has_cycle = signal.contains("cycle"), has_red = signal.contains("red"),
             has_green = signal.contains("green");
  if (has_cycle && has_green && !has_red) s.signal.red = s.signal.cycle - s.signal.green;
  if (has_cycle && has_red && !has_green) s.signal.green = s.signal.cycle - s.signal.red;
  if (!has_cycle && (has_red || has_green)) s.signal.cycle = s.signal.red + s.signal.green;

  const json& vehicles = section(root, "vehicles");
  known.clear();
  read_doubles(vehicles, "vehicles", kVehicleDoubles, s.vehicles, known);
  reject_unknown(vehicles, "vehicles", known);

  const json& demand = section(root, "demand");
  known.clear();
  read_doubles(demand, "demand", kDemandDoubles, s.demand, known);
  known.insert("seed");
  if (auto it = demand.find("seed"); it != demand.end()) {
    if (!it->is_number_unsigned()) throw ParseError("demand.seed: expected a non-negative integer");
    s.demand.seed = it->get<std::uint64_t>();
  }
  known.insert("capacity_vph");
  if (auto it = demand.find("capacity_vph"); it != demand.end() && !it->is_null()) {
    s.demand.capacity_vph = as_number(*it, "demand.capacity_vph");
  }
  reject_unknown(demand, "demand", known);

  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  json road;
  write_doubles(road, kRoadDoubles, s.road);
  road["lane_count_main"] = s.road.lane_count_main;
  road["bus_lane_index"] = s.road.bus_lane_index;
  road["bus_stop_pos"] = s.road.bus_stop_pos ? json(*s.road.bus_stop_pos) : json(nullptr);
  json signal;
  write_doubles(signal, kSignalDoubles, s.signal);
  json vehicles;
  write_doubles(vehicles, kVehicleDoubles, s.vehicles);
  json demand;
  write_doubles(demand, kDemandDoubles, s.demand);
  demand["seed"] = s.demand.seed;
  demand["capacity_vph"] = s.demand.capacity_vph ? json(*s.demand.capacity_vph) : json(nullptr);
  root["road"] = road;
  root["signal"] = signal;
  root["vehicles"] = vehicles;
  root["demand"] = demand;
  return root.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write scenario file " + path.string());
  out << serialize_scenario(s);
}

std::uint64_t fingerprint(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_scenario(s)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace buslane
