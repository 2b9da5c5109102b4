#pragma once

// Closed-form references written independently of the library code. Tests
// compare library results against these rather than against hard-coded
// numbers wherever a value is derived.

#include <algorithm>
#include <cmath>

#include "buslane/scenario.hpp"
#include "buslane/estimator.hpp"

namespace oracle {

// Accelerate from v0 at a up to vmax, then cruise.
inline double travel_time(double distance, double v0, double vmax, double a) {
  if (distance <= 0.0) return 0.0;
  const double ramp = (vmax * vmax - v0 * v0) / (2.0 * a);
  if (ramp >= distance) {
    const double v_end = std::sqrt(v0 * v0 + 2.0 * a * distance);
    return (v_end - v0) / a;
  }
  return (vmax - v0) / a + (distance - ramp) / vmax;
}

// Scan cycle by cycle: a time in red, or in the first `lost` seconds of green,
// moves to that cycle's green start plus the lost time.
inline double release(double t, double cycle, double red, double lost) {
  double start = 0.0;
  while (start + cycle <= t) start += cycle;
  while (start > t) start -= cycle;
  return t - start < red + lost ? start + red + lost : t;
}

// Highest speed that still stops within `room` meters at `decel`.
inline double stopping_speed(double room, double decel) {
  return std::sqrt(2.0 * decel * std::max(room, 0.0));
}

// Default road with the bus stop at 400 m and a fixed 1800 veh/h capacity.
inline buslane::Scenario stop_scenario() {
  buslane::Scenario s;
  s.road.bus_stop_pos = 400.0;
  s.demand.capacity_vph = 1800.0;
  return s;
}

inline buslane::VehicleState vehicle(int id, buslane::VehicleClass cls, double pos,
                                     double speed = 13.89,
                                     buslane::Movement m = buslane::Movement::Through,
                                     int lane = 1) {
  buslane::VehicleState v;
  v.id = id;
  v.lane = lane;
  v.cls = cls;
  v.movement = m;
  v.connected = buslane::is_connected(cls);
  v.pos = pos;
  v.speed = speed;
  v.length = cls == buslane::VehicleClass::Bus ? 12.0 : 5.0;
  return v;
}

// Renumbers `order` front to back after sorting by position.
template <typename Lane>
void order_lane(Lane& lane) {
  std::sort(lane.begin(), lane.end(), [](const auto& a, const auto& b) { return a.pos > b.pos; });
  for (std::size_t i = 0; i < lane.size(); ++i) lane[i].order = static_cast<int>(i) + 1;
}

}  // namespace oracle
