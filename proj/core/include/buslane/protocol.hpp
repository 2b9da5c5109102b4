#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "buslane/estimator.hpp"
#include "buslane/gaps.hpp"

namespace buslane {

enum class AdvisoryKind {
  RightTurnGap,       // connected right-turn vehicle inside a spatial gap's range
  RightTurnFallback,  // connected right-turn vehicle near the stop bar, not yet advised
  ThroughOptimized,   // selected by the right-of-way optimizer
  StaticEntry,        // rule-based entry (non-connected right turns, EBL/BLIDP right turns)
  ClearanceExit,      // BLIDP: leave the bus lane ahead of a bus
};

std::string_view to_string(AdvisoryKind k);

struct Advisory {
  int vehicle_id = 0;
  int target_lane = 0;
  AdvisoryKind kind = AdvisoryKind::RightTurnGap;
  double issued_at = 0.0;
  double expires_at = 0.0;
  bool urgent = false;  // accept tighter (still safe) gaps
};

/// Rule 1: connected right-turn vehicles on the adjacent general lane strictly
/// between a gap's follower and leader are advised into the bus lane.
std::vector<Advisory> right_turn_gap_advisories(std::span<const SpatialGap> asgs,
                                                std::span<const VehicleState> adjacent_lane,
                                                int bus_lane, double now, double lifetime);

/// Rule 2: connected right-turn vehicles past control_zone_len - fallback_dist
/// that hold no advisory yet are told to change on their own.
std::vector<Advisory> right_turn_fallback_advisories(std::span<const VehicleState> adjacent_lane,
                                                     const RoadConfig& road, double now,
                                                     double lifetime,
                                                     const std::unordered_set<int>& already_advised);

enum class RightTurnDirective { NotApplicable, Hold, EnterBusLane };

/// Rule 3: non-connected right turns enter the bus lane right after the bus
/// stop, or at the entry when the road has no stop.
RightTurnDirective nonconnected_right_turn_policy(const VehicleState& v, const RoadConfig& road);

/// Through vehicles eligible for one gap, renumbered k = 1..K by increasing
/// distance to the stop bar (members[0] is k = 1).
struct CandidateSet {
  SpatialGap gap;
  TemporalGap window;
  std::vector<int> members;
};

/// Rule 4. None when the window is empty, when a connected right-turn vehicle
/// sits ahead of the gap's follower on the adjacent lane, or when nobody fits.
/// `estimates` covers the adjacent lane (lookup by vehicle id).
std::optional<CandidateSet> through_candidates(const SpatialGap& asg, const TemporalGap& atg,
                                               std::span<const VehicleState> adjacent_lane,
                                               std::span<const DepartureEstimate> estimates,
                                               const RoadConfig& road);

/// True when no connected right-turn vehicle is on the adjacent lane between
/// the gap's follower and the stop bar.
bool right_turn_gate_open(const SpatialGap& asg, std::span<const VehicleState> adjacent_lane,
                          const RoadConfig& road);

const DepartureEstimate* find_estimate(std::span<const DepartureEstimate> estimates, int id);

}  // namespace buslane
