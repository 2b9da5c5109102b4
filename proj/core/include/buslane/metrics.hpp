#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "buslane/microsim.hpp"
#include "buslane/strategies.hpp"

namespace buslane {

enum class TripGroup { Bus, Through, RightTurn };
constexpr std::array<TripGroup, 3> kTripGroups = {TripGroup::Bus, TripGroup::Through,
                                                  TripGroup::RightTurn};

std::string_view to_string(TripGroup g);
TripGroup group_of(VehicleClass cls, Movement m);

/// Entry to stop bar at the speed limit; buses add the stop's braking and
/// acceleration losses plus the mean dwell when the road has a stop.
double free_flow_travel_time(VehicleClass cls, const Scenario& s);

/// Actual minus free-flow travel time, floored at zero. Travel time starts at
/// the scheduled arrival, so queueing outside the zone counts.
double compute_delay(const TripRecord& trip, const Scenario& s);

/// Linear interpolation between order statistics; 0 for an empty sample.
double percentile(std::vector<double> values, double q);

struct GroupMetrics {
  int trips = 0;
  double mean_delay = 0.0;
  double p50_delay = 0.0;
  double p90_delay = 0.0;
  double throughput_vph = 0.0;
  double mean_stops = 0.0;
  double proxy_energy = 0.0;  // unitless congestion proxy, not fuel or CO2
};

struct RunResult {
  std::uint64_t fingerprint = 0;
  StrategyKind strategy = StrategyKind::EBL;
  std::uint64_t seed = 0;
  std::array<GroupMetrics, 3> groups{};
  double bus_lane_general_vkm = 0.0;
  int spacing_violations = 0;
  double min_spacing = 0.0;
  int red_violations = 0;
  int entered = 0;
  std::size_t outside_queue = 0;
  std::map<AdvisoryKind, int> advisories;
  std::size_t audit_checked = 0;
  std::size_t audit_failed = 0;
  double wall_seconds = 0.0;
  bool ok = true;
  std::string error;

  const GroupMetrics& group(TripGroup g) const { return groups[static_cast<std::size_t>(g)]; }
};

/// Per-group metrics over trips that reached the stop bar after warmup.
std::array<GroupMetrics, 3> group_metrics(std::span<const TripRecord> trips, const Scenario& s);

RunResult summarize(const Simulation& sim, StrategyKind strategy,
                    const DstpController* dstp = nullptr);

constexpr std::string_view kTripHeader = "vehicle_id,class,movement,entry_s,exit_s,delay_s,stops";

void write_trip_csv(std::ostream& out, std::span<const TripRecord> trips, const Scenario& s);

}  // namespace buslane
