#pragma once

#include <span>
#include <vector>

#include "buslane/scenario.hpp"
#include "buslane/types.hpp"

namespace buslane {

/// Snapshot of one vehicle as seen by the control center.
struct VehicleState {
  int id = 0;
  int lane = 0;
  int order = 0;  // 1 = closest to the stop bar
  VehicleClass cls = VehicleClass::HDV;
  Movement movement = Movement::Through;
  bool connected = false;
  double pos = 0.0;     // front bumper, meters from entry
  double speed = 0.0;
  double length = 5.0;
  double dwell_remaining = 0.0;  // buses currently dwelling at the stop
  bool stop_served = false;      // buses that already left the stop

  double rear() const { return pos - length; }
};

struct DepartureEstimate {
  int vehicle_id = 0;
  double t_free = 0.0;         // no leader, no signal
  double t_unsignalized = 0.0; // leader chaining applied
  double t_depart = 0.0;       // signal applied
  double basis_time = 0.0;
};

/// Time to cover `distance` starting at `v0`, accelerating at `accel` up to
/// `v_max` and cruising. Covers the short-distance branch where v_max is never
/// reached.
double kinematic_travel_time(double distance, double v0, double v_max, double accel);

/// Earliest stop-bar arrival ignoring leaders and signals.
double free_flow_departure(double now, double pos, double v, const RoadConfig& road,
                           double accel);
double free_flow_departure(double now, double pos, double v, const RoadConfig& road,
                           const VehiclePopulation& pop);

/// Target time headway (plus redundancy) of `self` following `leader`.
/// Buses behave as CACC vehicles on both sides.
double desired_headway(VehicleClass self, VehicleClass leader, const VehiclePopulation& pop);

/// Departure ignoring the signal: `reference` is the detector timestamp for
/// the lane's first vehicle or the leader's departure otherwise (may be -inf).
double unsignalized_departure(double reference, double tau, double t_free);

/// Pushes a departure out of red to the next green start plus lost time;
/// exempt (right-turn) movements pass through unchanged.
double signalized_departure(double t_unsignalized, const SignalPlan& signal, double lost_time,
                            bool exempt);

struct BusStopDeparture {
  double t_free;
  double t_unsignalized;
  double t_depart;
};

/// Bus that still has to serve the stop: reach the stop, dwell, restart from
/// standstill to the stop bar, then chain behind the leader and the signal.
BusStopDeparture bus_stop_departure(double now, double pos, double v, double leader_td,
                                    double tau, double dwell, const RoadConfig& road,
                                    const VehiclePopulation& pop, const SignalPlan& signal,
                                    double lost_time);

/// Whether a bus still has to stop at the (present) bus stop.
bool bus_pending_stop(const VehicleState& v, const RoadConfig& road);

/// Index of the bus that anchors the bus-lane estimation and gap recognition
/// range: the front-most bus still upstream of, or dwelling at, the stop.
/// Returns -1 when no such bus exists or the road has no stop.
int anchoring_bus_index(std::span<const VehicleState> lane, const RoadConfig& road);

struct LaneContext {
  int lane = 0;
  double last_detection = kNegInf;  // latest stop-bar detector actuation on the lane
};

/// Estimates every vehicle of the estimated set of one lane. `vehicles` must be
/// ordered front (closest to the stop bar) to back. On the bus lane of a road
/// with a stop, vehicles behind the anchoring bus are skipped. Output order
/// matches input order.
std::vector<DepartureEstimate> estimate_lane(std::span<const VehicleState> vehicles,
                                             const LaneContext& ctx, const Scenario& scenario,
                                             double now);

}  // namespace buslane
