#include "buslane/protocol.hpp"

namespace buslane {

std::string_view to_string(AdvisoryKind k) {
  switch (k) {
    case AdvisoryKind::RightTurnGap: return "RightTurnGap";
    case AdvisoryKind::RightTurnFallback: return "RightTurnFallback";
    case AdvisoryKind::ThroughOptimized: return "ThroughOptimized";
    case AdvisoryKind::StaticEntry: return "StaticEntry";
    case AdvisoryKind::ClearanceExit: return "ClearanceExit";
  }
  return "?";
}

namespace {

bool connected_right_turn(const VehicleState& v) {
  return v.connected && v.movement == Movement::RightTurn && is_general(v.cls);
}

}  // namespace

std::vector<Advisory> right_turn_gap_advisories(std::span<const SpatialGap> asgs,
                                                std::span<const VehicleState> adjacent_lane,
                                                int bus_lane, double now, double lifetime) {
  std::vector<Advisory> out;
  std::unordered_set<int> seen;
  for (const auto& gap : asgs) {
    for (const auto& v : adjacent_lane) {
      if (!connected_right_turn(v)) continue;
      if (v.pos > gap.follower_pos && v.pos < gap.leader_pos && seen.insert(v.id).second) {
        out.push_back({v.id, bus_lane, AdvisoryKind::RightTurnGap, now, now + lifetime, false});
      }
    }
  }
  return out;
}

std::vector<Advisory> right_turn_fallback_advisories(std::span<const VehicleState> adjacent_lane,
                                                     const RoadConfig& road, double now,
                                                     double lifetime,
                                                     const std::unordered_set<int>& already_advised) {
  std::vector<Advisory> out;
  const double threshold = road.stop_bar() - road.right_turn_fallback_dist;
  for (const auto& v : adjacent_lane) {
    if (!connected_right_turn(v) || v.pos <= threshold || already_advised.count(v.id)) continue;
    out.push_back({v.id, road.bus_lane_index, AdvisoryKind::RightTurnFallback, now,
                   now + lifetime, true});
  }
  return out;
}

RightTurnDirective nonconnected_right_turn_policy(const VehicleState& v, const RoadConfig& road) {
  if (v.cls != VehicleClass::HDV || v.movement != Movement::RightTurn) {
    return RightTurnDirective::NotApplicable;
  }
  if (road.bus_stop_pos && v.pos <= *road.bus_stop_pos) return RightTurnDirective::Hold;
  return RightTurnDirective::EnterBusLane;
}

bool right_turn_gate_open(const SpatialGap& asg, std::span<const VehicleState> adjacent_lane,
                          const RoadConfig& road) {
  for (const auto& v : adjacent_lane) {
    if (connected_right_turn(v) && v.pos > asg.follower_pos && v.pos < road.stop_bar()) {
      return false;
    }
  }
  return true;
}

const DepartureEstimate* find_estimate(std::span<const DepartureEstimate> estimates, int id) {
  for (const auto& e : estimates) {
    if (e.vehicle_id == id) return &e;
  }
  return nullptr;
}

std::optional<CandidateSet> through_candidates(const SpatialGap& asg, const TemporalGap& atg,
                                               std::span<const VehicleState> adjacent_lane,
                                               std::span<const DepartureEstimate> estimates,
                                               const RoadConfig& road) {
  if (atg.empty() || !right_turn_gate_open(asg, adjacent_lane, road)) return std::nullopt;

  CandidateSet set{asg, atg, {}};
  for (const auto& v : adjacent_lane) {  // front to back
    if (!v.connected || !is_general(v.cls) || v.movement != Movement::Through) continue;
    if (v.pos < asg.follower_pos || v.pos > asg.leader_pos) continue;
    const DepartureEstimate* e = find_estimate(estimates, v.id);
    if (e && atg.contains(e->t_free)) set.members.push_back(v.id);
  }
  if (set.members.empty()) return std::nullopt;
  return set;
}

}  // namespace buslane
