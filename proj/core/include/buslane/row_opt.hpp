#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "buslane/gaps.hpp"
#include "buslane/scenario.hpp"
#include "buslane/types.hpp"

namespace buslane {

/// Headway-plus-redundancy values by follower/leader type.
struct HeadwayTable {
  double automated_pair = 0.7;          // CAV/bus behind CAV/bus
  double automated_behind_human = 1.3;  // CAV/bus behind HDV/CHV
  double human = 2.0;                   // HDV/CHV behind anything

  double tau(VehicleClass self, VehicleClass leader) const;
  static HeadwayTable from(const VehiclePopulation& pop);
  bool operator==(const HeadwayTable&) const = default;
};

struct RowCandidate {
  int vehicle_id = 0;
  double pos = 0.0;
  double speed = 0.0;
  VehicleClass cls = VehicleClass::CAV;
  double t_free_general = 0.0;
  double t_free_bus = 0.0;
  double length = 5.0;
  bool operator==(const RowCandidate&) const = default;
};

/// The predecessor that starts the chain on one lane; `present == false` means
/// no predecessor at all. A non-spatial anchor only carries a departure time
/// (the lane's last detector actuation) and is skipped by the lateral checks.
struct LaneAnchor {
  bool present = false;
  bool spatial = true;
  double pos = 0.0;
  double speed = 0.0;
  double length = 5.0;
  double t_depart = 0.0;
  VehicleClass cls = VehicleClass::HDV;
  bool operator==(const LaneAnchor&) const = default;
};

/// One right-of-way assignment problem: candidates on the general lane next to
/// a single bus-lane gap, ordered k = 1..K by increasing distance to the bar.
struct RowInstance {
  std::vector<RowCandidate> candidates;
  LaneAnchor bus_leader;
  LaneAnchor bus_follower;
  LaneAnchor general_leader;
  std::vector<TimeWindow> windows;
  SignalPlan signal;
  double lost_time = 2.0;
  HeadwayTable headways;
  double lateral_safe_gap = 6.0;
  double lateral_comfort_decel = 4.0;
  double no_change_boundary = 670.0;

  std::size_t size() const { return candidates.size(); }
  bool operator==(const RowInstance&) const = default;
};

enum class Violation { None, Static, Window };

/// Times of one assignment. Virtual slots hold the inherited predecessor time
/// (NaN when the lane has no predecessor at all).
struct Evaluation {
  Violation violation = Violation::None;
  std::size_t violated_index = 0;
  std::vector<double> t_general;
  std::vector<double> t_bus;
  double objective = 0.0;

  bool feasible() const { return violation == Violation::None; }
};

enum class SolveStatus { Optimal, AllInfeasible };

struct RowSolution {
  std::vector<std::uint8_t> x;
  std::vector<double> t_general;
  std::vector<double> t_bus;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  std::uint64_t nodes = 0;

  std::size_t lane_changes() const;
};

/// Forward recursion on both lanes for a fixed assignment, then the static and
/// window checks. `x[k] == 1` advises candidate k into the bus lane.
Evaluation evaluate_assignment(const RowInstance& inst, std::span<const std::uint8_t> x);

/// Moving, outside the no-change zone, and laterally safe against the gap's
/// leader and follower. `k` is zero-based.
bool static_feasible(const RowInstance& inst, std::size_t k);

/// Enumerates every assignment (K <= 20). Ties: fewer lane changes, then the
/// lexicographically smallest x.
RowSolution solve_exhaustive(const RowInstance& inst);

/// Depth-first branch and bound with the same tie-breaking as solve_exhaustive.
RowSolution solve_bnb(const RowInstance& inst);

/// Line-oriented text form, one candidate per line.
std::string dump_instance(const RowInstance& inst);
RowInstance parse_instance(std::string_view text);

}  // namespace buslane
