#pragma once

#include <optional>
#include <span>
#include <vector>

#include "buslane/estimator.hpp"
#include "buslane/scenario.hpp"

namespace buslane {

/// An available spatial gap on the bus lane. Either side may be a virtual
/// boundary: the stop bar ahead, or the entry / anchoring stop-bound bus behind.
struct SpatialGap {
  std::optional<int> leader_id;    // empty: stop bar
  std::optional<int> follower_id;  // empty: start of the recognition range
  double leader_pos = 0.0;    // front bumper of the leader (stop bar when virtual)
  double follower_pos = 0.0;  // front bumper of the follower (range start when virtual)
  double front_pos = 0.0;     // leader's rear bumper
  double rear_pos = 0.0;      // follower's front bumper

  double length() const { return front_pos - rear_pos; }
  bool leader_is_virtual() const { return !leader_id; }
  bool follower_is_virtual() const { return !follower_id; }
};

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool contains(double t) const { return t >= start && t <= end; }
  bool operator==(const TimeWindow&) const = default;
};

/// The green-time windows companion to one spatial gap.
struct TemporalGap {
  std::vector<TimeWindow> windows;
  double leader_td = 0.0;
  double follower_td = 0.0;

  bool empty() const { return windows.empty(); }
  bool contains(double t) const;
};

/// Minimum usable gap: front margin + one car + rear margin.
double min_gap(const VehiclePopulation& pop);

/// Start of the recognition range: 0, or the anchoring bus position when a bus
/// is approaching or dwelling at the stop.
double recognition_start(std::span<const VehicleState> bus_lane, const RoadConfig& road);

/// Gaps of at least min_gap inside the recognition range, front to back.
/// `bus_lane` must be ordered front to back.
std::vector<SpatialGap> find_asgs(std::span<const VehicleState> bus_lane, const RoadConfig& road,
                                  const VehiclePopulation& pop);

/// Maximal sub-intervals of [leader_td, follower_td - tau] that fall in green,
/// dropping windows shorter than min_window.
TemporalGap compute_atg(double leader_td, double follower_td, double tau,
                        const SignalPlan& signal, double min_window);
TemporalGap compute_atg(double leader_td, double follower_td, double tau,
                        const SignalPlan& signal, const VehiclePopulation& pop);

/// Grid-sampled reference for compute_atg (test oracle, `grid` <= 0.1 s).
/// Transitions found on the grid are refined by bisection on the green test.
TemporalGap atg_brute_force(double leader_td, double follower_td, double tau,
                            const SignalPlan& signal, double min_window, double grid);

}  // namespace buslane
