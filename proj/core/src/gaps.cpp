#include "buslane/gaps.hpp"

#include <cmath>

namespace buslane {

bool TemporalGap::contains(double t) const {
  for (const auto& w : windows) {
    if (w.contains(t)) return true;
  }
  return false;
}

double min_gap(const VehiclePopulation& pop) {
  return pop.asg_margin_front + pop.car_len + pop.asg_margin_rear;
}

double recognition_start(std::span<const VehicleState> bus_lane, const RoadConfig& road) {
  const int anchor = anchoring_bus_index(bus_lane, road);
  return anchor >= 0 ? bus_lane[static_cast<std::size_t>(anchor)].pos : 0.0;
}

std::vector<SpatialGap> find_asgs(std::span<const VehicleState> bus_lane, const RoadConfig& road,
                                  const VehiclePopulation& pop) {
  const double d_min = min_gap(pop);
  const int anchor = anchoring_bus_index(bus_lane, road);
  const std::size_t count =
      anchor >= 0 ? static_cast<std::size_t>(anchor) + 1 : bus_lane.size();

  std::vector<SpatialGap> out;
  SpatialGap next;
  next.leader_pos = road.stop_bar();
  next.front_pos = road.stop_bar();
  for (std::size_t i = 0; i < count; ++i) {
    const VehicleState& v = bus_lane[i];
    next.follower_id = v.id;
    next.follower_pos = v.pos;
    next.rear_pos = v.pos;
    if (next.length() >= d_min) out.push_back(next);

    next = SpatialGap{};
    next.leader_id = v.id;
    next.leader_pos = v.pos;
    next.front_pos = std::min(v.rear(), road.stop_bar());
  }
  if (anchor < 0) {
    next.follower_pos = 0.0;
    next.rear_pos = 0.0;
    if (next.length() >= d_min) out.push_back(next);
  }
  return out;
}

TemporalGap compute_atg(double leader_td, double follower_td, double tau,
                        const SignalPlan& signal, double min_window) {
  TemporalGap out;
  out.leader_td = leader_td;
  out.follower_td = follower_td;
  const double end = follower_td - tau;
  if (!(end > leader_td)) return out;

  const double c = signal.cycle;
  const long first_cycle = static_cast<long>(std::floor(leader_td / c));
  const long last_cycle = static_cast<long>(std::floor(end / c));
  const long delta = last_cycle - first_cycle;

  auto keep = [&](double a, double b) {
    if (b - a >= min_window) out.windows.push_back({a, b});
  };

  const double first_green = static_cast<double>(first_cycle) * c + signal.red;
  if (delta == 0) {
    keep(std::max(leader_td, first_green), end);
    return out;
  }
  // Tail of the leader's cycle, full greens in between, head of the last cycle.
  keep(std::max(leader_td, first_green), static_cast<double>(first_cycle + 1) * c);
  for (long n = 1; n < delta; ++n) {
    const double base = static_cast<double>(first_cycle + n) * c;
    keep(base + signal.red, base + c);
  }
  keep(static_cast<double>(last_cycle) * c + signal.red, end);
  return out;
}

TemporalGap compute_atg(double leader_td, double follower_td, double tau,
                        const SignalPlan& signal, const VehiclePopulation& pop) {
  return compute_atg(leader_td, follower_td, tau, signal, pop.tau_a);
}

}  // namespace buslane
