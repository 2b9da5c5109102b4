#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "buslane/estimator.hpp"
#include "buslane/protocol.hpp"
#include "buslane/scenario.hpp"

namespace buslane {

struct SimVehicle {
  int id = 0;
  VehicleClass cls = VehicleClass::HDV;
  Movement movement = Movement::Through;
  bool connected = false;
  int lane = 0;
  double pos = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double length = 5.0;
  double arrival_time = 0.0;  // scheduled arrival, before any outside queueing
  double entry_time = 0.0;
  std::optional<double> crossing_time;

  int stops = 0;
  bool halted = false;
  double energy = 0.0;

  double dwell_total = 0.0;
  double dwell_remaining = 0.0;
  bool dwelling = false;
  bool stop_served = false;
  bool signal_hold = false;  // committed to stop at the bar this red

  double last_lane_change = kNegInf;
  std::mt19937_64 driver_rng;

  double rear() const { return pos - length; }
  bool crossed() const { return crossing_time.has_value(); }
  VehicleState state(int order) const;
};

struct TripRecord {
  int vehicle_id = 0;
  VehicleClass cls = VehicleClass::HDV;
  Movement movement = Movement::Through;
  double entry_s = 0.0;
  double exit_s = 0.0;
  int stops = 0;
  double energy = 0.0;
};

/// A departure estimate taken from a live snapshot, kept for fidelity checks.
struct EstimateSample {
  int vehicle_id = 0;
  double taken_at = 0.0;
  double estimated = 0.0;
};

struct SimStats {
  long ticks = 0;
  int entered = 0;
  int removed = 0;
  int spacing_violations = 0;  // bumper gap below 0.5 m
  double min_spacing = kPosInf;
  int red_violations = 0;
  int lane_changes = 0;
  double bus_lane_general_m = 0.0;  // after warmup, inside the control zone
  std::map<AdvisoryKind, int> advisories;
};

struct SimOptions {
  bool discretionary_lane_changes = true;
  std::optional<int> force_spawn_lane;  // every general arrival uses this lane
  bool spawn_buses = true;
  bool saturated_entry = false;        // keep the entry queue non-empty
  double snapshot_interval = 0.0;      // > 0: record estimator samples
  std::ostream* trajectory = nullptr;  // per-tick CSV rows
};

class Simulation;

/// Lane-usage strategy hooked into every tick.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string_view name() const = 0;
  virtual std::vector<Advisory> on_tick(const Simulation& sim) = 0;
  /// Whether `v` may move into the bus lane on its own initiative right now.
  virtual bool permits_bus_lane_entry(const Simulation& sim, const SimVehicle& v) const;
};

/// Leaves lane usage to the built-in rules.
class NullController : public Controller {
 public:
  std::string_view name() const override { return "none"; }
  std::vector<Advisory> on_tick(const Simulation&) override { return {}; }
};

/// Placement of a vehicle directly onto the road (tests, warm starts).
struct VehicleSeed {
  VehicleClass cls = VehicleClass::CAV;
  Movement movement = Movement::Through;
  int lane = 0;
  double pos = 0.0;
  double speed = 0.0;
  double dwell = 0.0;  // buses only
};

constexpr std::string_view kTrajectoryHeader =
    "tick,time_s,vehicle_id,class,movement,lane,pos_m,speed_mps,advisory_kind";

class Simulation {
 public:
  Simulation(Scenario scenario, Controller& controller, SimOptions options = {});

  void step();
  void run();
  bool finished() const;

  double now() const { return static_cast<double>(tick_) * dt_; }
  long tick() const { return tick_; }
  const Scenario& scenario() const { return scenario_; }
  const SimOptions& options() const { return options_; }

  std::span<const SimVehicle> vehicles() const { return vehicles_; }
  const SimVehicle* find(int id) const;
  /// Vehicles upstream of the stop bar on `lane`, front to back.
  std::vector<VehicleState> lane_states(int lane) const;
  double last_detection(int lane) const;
  bool on_optimizer_tick() const;

  const std::unordered_map<int, Advisory>& advisories() const { return board_; }
  const std::vector<TripRecord>& trips() const { return trips_; }
  const std::vector<EstimateSample>& estimate_samples() const { return samples_; }
  const SimStats& stats() const { return stats_; }
  std::size_t outside_queue() const { return general_queue_.size() + bus_queue_.size(); }

  int insert_vehicle(const VehicleSeed& seed);

  /// Gap-acceptance check and one-tick lateral transfer.
  bool attempt_lane_change(int id, int target_lane, bool urgent);

 private:
  struct Pending {
    int id;
    VehicleClass cls;
    Movement movement;
    double arrival;
    double dwell;
  };

  SimVehicle make_vehicle(int id, VehicleClass cls, Movement movement, double arrival);
  SimVehicle* find_mut(int id);
  void rebuild_lanes();
  int neighbor_ahead(int lane, double pos, int self) const;
  int neighbor_behind(int lane, double pos, int self) const;

  void record_snapshots();
  void apply_controller();
  void lane_change_phase();
  void follow_phase();
  void check_spacing();
  void spawn_phase();
  void generate_arrivals();
  bool try_insert(const Pending& p, int lane);
  void write_trajectory() const;

  double lane_attractiveness(const SimVehicle& v, int lane) const;
  std::optional<double> obstacle_for(SimVehicle& v) const;
  /// Lane a right-turner must merge into soon, or -1.
  int merge_target(const SimVehicle& v) const;

  Scenario scenario_;
  Controller& controller_;
  SimOptions options_;
  double dt_;
  long tick_ = 0;
  long end_tick_;
  long optimizer_stride_;

  std::vector<SimVehicle> vehicles_;
  std::vector<std::vector<int>> lanes_;  // indices into vehicles_, front to back
  std::vector<double> detections_;
  std::unordered_map<int, Advisory> board_;
  std::deque<Pending> general_queue_;
  std::deque<Pending> bus_queue_;
  std::vector<TripRecord> trips_;
  std::vector<EstimateSample> samples_;
  SimStats stats_;

  std::mt19937_64 arrival_rng_;
  std::mt19937_64 bus_rng_;
  double next_bus_time_ = 0.0;
  int next_id_ = 1;
};

}  // namespace buslane
