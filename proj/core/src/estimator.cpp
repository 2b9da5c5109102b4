#include "buslane/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace buslane {

double kinematic_travel_time(double distance, double v0, double v_max, double accel) {
  if (distance <= 0.0) return 0.0;
  if (v0 >= v_max) return distance / v_max;
  const double accel_dist = (v_max * v_max - v0 * v0) / (2.0 * accel);
  if (distance >= accel_dist) {
    return (distance - accel_dist) / v_max + (v_max - v0) / accel;
  }
  // Never reaches v_max: distance = v0 t + a t^2 / 2.
  return (-v0 + std::sqrt(v0 * v0 + 2.0 * accel * distance)) / accel;
}

double free_flow_departure(double now, double pos, double v, const RoadConfig& road,
                           double accel) {
  return now + kinematic_travel_time(road.stop_bar() - pos, v, road.speed_limit, accel);
}

double free_flow_departure(double now, double pos, double v, const RoadConfig& road,
                           const VehiclePopulation& pop) {
  return free_flow_departure(now, pos, v, road, pop.car_accel);
}

double desired_headway(VehicleClass self, VehicleClass leader, const VehiclePopulation& pop) {
  if (!is_automated(self)) return pop.tau_h + pop.eps_h;
  if (is_automated(leader)) return pop.tau_c + pop.eps_c;
  return pop.tau_a + pop.eps_a;
}

double unsignalized_departure(double reference, double tau, double t_free) {
  return std::max(reference + tau, t_free);
}

double signalized_departure(double t_unsignalized, const SignalPlan& signal, double lost_time,
                            bool exempt) {
  if (exempt) return t_unsignalized;
  const double red_start = std::floor(t_unsignalized / signal.cycle) * signal.cycle;
  const double green_start = red_start + signal.red;
  return std::max(t_unsignalized, green_start + lost_time);
}

BusStopDeparture bus_stop_departure(double now, double pos, double v, double leader_td,
                                    double tau, double dwell, const RoadConfig& road,
                                    const VehiclePopulation& pop, const SignalPlan& signal,
                                    double lost_time) {
  const double stop = road.bus_stop_pos.value_or(pos);
  const double to_stop = kinematic_travel_time(stop - pos, v, road.speed_limit, pop.bus_accel);
  const double from_stop =
      kinematic_travel_time(road.stop_bar() - stop, 0.0, road.speed_limit, pop.bus_accel);
  BusStopDeparture out{};
  out.t_free = now + to_stop + std::max(dwell, 0.0) + from_stop;
  out.t_unsignalized = unsignalized_departure(leader_td, tau, out.t_free);
  out.t_depart = signalized_departure(out.t_unsignalized, signal, lost_time, false);
  return out;
}

bool bus_pending_stop(const VehicleState& v, const RoadConfig& road) {
  return v.cls == VehicleClass::Bus && road.bus_stop_pos && !v.stop_served &&
         v.pos <= *road.bus_stop_pos + 1e-6;
}

int anchoring_bus_index(std::span<const VehicleState> lane, const RoadConfig& road) {
  if (!road.has_bus_stop()) return -1;
  for (std::size_t i = 0; i < lane.size(); ++i) {
    if (bus_pending_stop(lane[i], road)) return static_cast<int>(i);
  }
  return -1;
}

std::vector<DepartureEstimate> estimate_lane(std::span<const VehicleState> vehicles,
                                             const LaneContext& ctx, const Scenario& scenario,
                                             double now) {
  const auto& road = scenario.road;
  const auto& pop = scenario.vehicles;
  const double lost = pop.startup_lost_time;

  std::size_t count = vehicles.size();
  if (ctx.lane == road.bus_lane_index) {
    if (const int anchor = anchoring_bus_index(vehicles, road); anchor >= 0) {
      count = static_cast<std::size_t>(anchor) + 1;
    }
  }

  std::vector<DepartureEstimate> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const VehicleState& v = vehicles[i];
    double reference = ctx.last_detection;
    // The class that last actuated the detector is unknown; assume a human leader.
    double tau = desired_headway(v.cls, VehicleClass::HDV, pop);
    if (i > 0) {
      reference = out.back().t_depart;
      tau = desired_headway(v.cls, vehicles[i - 1].cls, pop);
    }

    DepartureEstimate e;
    e.vehicle_id = v.id;
    e.basis_time = now;
    if (bus_pending_stop(v, road)) {
      const double dwell = v.dwell_remaining > 0.0 ? v.dwell_remaining : scenario.demand.dwell_mean;
      const auto b = bus_stop_departure(now, v.pos, v.speed, reference, tau, dwell, road, pop,
                                        scenario.signal, lost);
      e.t_free = b.t_free;
      e.t_unsignalized = b.t_unsignalized;
      e.t_depart = b.t_depart;
    } else {
      const double accel = v.cls == VehicleClass::Bus ? pop.bus_accel : pop.car_accel;
      e.t_free = free_flow_departure(now, v.pos, v.speed, road, accel);
      e.t_unsignalized = unsignalized_departure(reference, tau, e.t_free);
      e.t_depart = signalized_departure(e.t_unsignalized, scenario.signal, lost,
                                        v.movement == Movement::RightTurn);
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace buslane
