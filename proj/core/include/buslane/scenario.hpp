#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace buslane {

/// Approach geometry. Positions are meters from the control-zone entry; the
/// stop bar sits at control_zone_len. Lanes are indexed 0.. from the left;
/// the right-turn pocket is lane index lane_count_main.
struct RoadConfig {
  double control_zone_len = 700.0;
  double no_change_zone_len = 30.0;
  std::optional<double> bus_stop_pos;
  double right_turn_pocket_len = 100.0;
  int lane_count_main = 3;
  int bus_lane_index = 2;
  double right_turn_fallback_dist = 150.0;
  double speed_limit = 13.89;

  double stop_bar() const { return control_zone_len; }
  double no_change_boundary() const { return control_zone_len - no_change_zone_len; }
  double pocket_start() const { return control_zone_len - right_turn_pocket_len; }
  int pocket_lane() const { return lane_count_main; }
  int adjacent_general_lane() const { return bus_lane_index - 1; }
  bool has_bus_stop() const { return bus_stop_pos.has_value(); }

  bool operator==(const RoadConfig&) const = default;
};

/// Fixed-time plan: every cycle [k*cycle, (k+1)*cycle) opens with red.
struct SignalPlan {
  double cycle = 100.0;
  double red = 60.0;
  double green = 40.0;

  double cycle_start(double t) const { return std::floor(t / cycle) * cycle; }
  double green_start(double t) const { return cycle_start(t) + red; }
  bool is_green(double t) const { return t - cycle_start(t) >= red; }
  /// Seconds of green left at t, zero during red.
  double green_remaining(double t) const {
    return is_green(t) ? cycle_start(t) + cycle - t : 0.0;
  }

  bool operator==(const SignalPlan&) const = default;
};

struct VehiclePopulation {
  double car_len = 5.0;
  double bus_len = 12.0;
  double car_accel = 3.0;
  double car_decel = 4.0;
  double bus_accel = 2.0;
  double bus_decel = 2.0;
  double emergency_decel = 9.0;
  double tau_c = 0.6;
  double tau_a = 1.1;
  double tau_h = 1.5;
  double eps_c = 0.1;
  double eps_a = 0.2;
  double eps_h = 0.5;
  double startup_lost_time = 2.0;
  double lateral_comfort_decel = 4.0;
  double lateral_safe_gap = 6.0;
  double asg_margin_front = 6.0;
  double asg_margin_rear = 6.0;
  // Simulator-only driver parameters.
  double min_gap_human = 2.5;
  double min_gap_automated = 2.0;
  double krauss_sigma = 0.5;

  bool operator==(const VehiclePopulation&) const = default;
};

struct DemandSpec {
  double vc_ratio = 1.0;
  double cpr = 1.0;
  double cav_chv_split = 0.5;
  double right_turn_ratio = 0.3;
  double bus_headway_mean = 60.0;
  double bus_headway_std = 10.0;
  double dwell_mean = 20.0;
  double dwell_std = 10.0;
  std::uint64_t seed = 1;
  double sim_duration = 1800.0;
  double warmup = 300.0;
  double control_interval = 5.0;
  double sim_dt = 0.5;
  /// Stop-bar capacity (veh/h) that vc_ratio scales; calibrated when absent.
  std::optional<double> capacity_vph;

  bool operator==(const DemandSpec&) const = default;
};

struct Scenario {
  RoadConfig road;
  SignalPlan signal;
  VehiclePopulation vehicles;
  DemandSpec demand;

  bool operator==(const Scenario&) const = default;
};

/// Throws ValidationError naming the first offending field.
void validate(const Scenario& s);

/// Parses the JSON scenario schema; omitted optional fields take defaults.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON (sorted keys, every field present).
std::string serialize_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// Stable 64-bit FNV-1a hash of the canonical serialization.
std::uint64_t fingerprint(const Scenario& s);

}  // namespace buslane
