#include "buslane/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace buslane {

std::string_view to_string(TripGroup g) {
  switch (g) {
    case TripGroup::Bus: return "bus";
    case TripGroup::Through: return "through";
    case TripGroup::RightTurn: return "right_turn";
  }
  return "?";
}

TripGroup group_of(VehicleClass cls, Movement m) {
  if (cls == VehicleClass::Bus) return TripGroup::Bus;
  return m == Movement::RightTurn ? TripGroup::RightTurn : TripGroup::Through;
}

double free_flow_travel_time(VehicleClass cls, const Scenario& s) {
  const double v = s.road.speed_limit;
  double t = s.road.control_zone_len / v;
  if (cls == VehicleClass::Bus && s.road.has_bus_stop()) {
    t += v / (2.0 * s.vehicles.bus_decel) + v / (2.0 * s.vehicles.bus_accel) + s.demand.dwell_mean;
  }
  return t;
}

double compute_delay(const TripRecord& trip, const Scenario& s) {
  return std::max(0.0, trip.exit_s - trip.entry_s - free_flow_travel_time(trip.cls, s));
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double rank = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (rank - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::array<GroupMetrics, 3> group_metrics(std::span<const TripRecord> trips, const Scenario& s) {
  std::array<std::vector<const TripRecord*>, 3> by_group;
  for (const auto& t : trips) {
    if (t.exit_s < s.demand.warmup) continue;
    by_group[static_cast<std::size_t>(group_of(t.cls, t.movement))].push_back(&t);
  }
  const double hours = (s.demand.sim_duration - s.demand.warmup) / 3600.0;

  std::array<GroupMetrics, 3> out{};
  for (std::size_t g = 0; g < by_group.size(); ++g) {
    const auto& members = by_group[g];
    GroupMetrics& m = out[g];
    m.trips = static_cast<int>(members.size());
    m.throughput_vph = hours > 0.0 ? static_cast<double>(members.size()) / hours : 0.0;
    if (members.empty()) continue;
    std::vector<double> delays;
    delays.reserve(members.size());
    double stops = 0.0;
    double energy = 0.0;
    for (const TripRecord* t : members) {
      delays.push_back(compute_delay(*t, s));
      stops += t->stops;
      energy += t->energy;
    }
    const double n = static_cast<double>(members.size());
    double sum = 0.0;
    for (double d : delays) sum += d;
    m.mean_delay = sum / n;
    m.p50_delay = percentile(delays, 0.5);
    m.p90_delay = percentile(delays, 0.9);
    m.mean_stops = stops / n;
    m.proxy_energy = energy / n;
  }
  return out;
}

RunResult summarize(const Simulation& sim, StrategyKind strategy, const DstpController* dstp) {
  const Scenario& s = sim.scenario();
  const SimStats& st = sim.stats();
  RunResult r;
  r.fingerprint = fingerprint(s);
  r.strategy = strategy;
  r.seed = s.demand.seed;
  r.groups = group_metrics(sim.trips(), s);
  r.bus_lane_general_vkm = st.bus_lane_general_m / 1000.0;
  r.spacing_violations = st.spacing_violations;
  r.min_spacing = st.min_spacing;
  r.red_violations = st.red_violations;
  r.entered = st.entered;
  r.outside_queue = sim.outside_queue();
  r.advisories = st.advisories;
  if (dstp) {
    r.audit_checked = dstp->audit().size();
    r.audit_failed = static_cast<std::size_t>(
        std::count_if(dstp->audit().begin(), dstp->audit().end(),
                      [](const AuditRecord& a) { return !a.ok(); }));
  }
  return r;
}

void write_trip_csv(std::ostream& out, std::span<const TripRecord> trips, const Scenario& s) {
  out << kTripHeader << '\n';
  for (const auto& t : trips) {
    out << fmt::format("{},{},{},{:.3f},{:.3f},{:.3f},{}\n", t.vehicle_id, to_string(t.cls),
                       to_string(t.movement), t.entry_s, t.exit_s, compute_delay(t, s), t.stops);
  }
}

}  // namespace buslane
