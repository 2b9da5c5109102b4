#include "buslane/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "buslane/gaps.hpp"

namespace buslane {

std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::EBL: return "ebl";
    case StrategyKind::BLIDP: return "blidp";
    case StrategyKind::DSTP: return "dstp";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy(std::string_view s) {
  if (s == "ebl") return StrategyKind::EBL;
  if (s == "blidp") return StrategyKind::BLIDP;
  if (s == "dstp") return StrategyKind::DSTP;
  return std::nullopt;
}

ControllerConfig ControllerConfig::defaults(StrategyKind kind, const Scenario& s) {
  ControllerConfig c;
  c.kind = kind;
  c.control_interval = s.demand.control_interval;
  c.estimation_horizon = 2.0 * s.signal.cycle;
  return c;
}

void validate(const ControllerConfig& c, const Scenario& s) {
  if (c.kind == StrategyKind::BLIDP && !(c.clearance_dist > 0.0)) {
    throw ValidationError("clearance_dist", "must be positive");
  }
  const double ratio = c.control_interval / s.demand.sim_dt;
  if (!(c.control_interval > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw ValidationError("control_interval", "must be a positive multiple of sim_dt");
  }
  if (!(c.estimation_horizon > 0.0)) {
    throw ValidationError("estimation_horizon", "must be positive");
  }
}

namespace {

const VehicleState* find_state(std::span<const VehicleState> lane, int id) {
  for (const auto& v : lane) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

LaneAnchor anchor_of(const VehicleState& v, double t_depart) {
  LaneAnchor a;
  a.present = true;
  a.pos = v.pos;
  a.speed = v.speed;
  a.length = v.length;
  a.t_depart = t_depart;
  a.cls = v.cls;
  return a;
}

// Chain start taken from the lane's detector, as the estimator does.
LaneAnchor detector_anchor(double detection) {
  LaneAnchor a;
  if (std::isfinite(detection)) {
    a.present = true;
    a.spatial = false;
    a.t_depart = detection;
  }
  return a;
}

bool general_right_turn(const VehicleState& v) {
  return is_general(v.cls) && v.movement == Movement::RightTurn;
}

}  // namespace

DstpDecision dstp_decide(const DstpSnapshot& snap, const Scenario& scenario,
                         const ControllerConfig& config) {
  const auto& road = scenario.road;
  const auto& pop = scenario.vehicles;
  const int bus_lane = road.bus_lane_index;
  const int adjacent = road.adjacent_general_lane();
  const double now = snap.now;
  const double lifetime = config.control_interval;

  DstpDecision out;
  const auto bus_est =
      estimate_lane(snap.bus_lane, {bus_lane, snap.bus_lane_detection}, scenario, now);
  std::vector<VehicleState> adj = snap.adjacent_lane;
  auto adj_est = estimate_lane(adj, {adjacent, snap.adjacent_detection}, scenario, now);
  const auto asgs = find_asgs(snap.bus_lane, road, pop);

  auto rule1 = right_turn_gap_advisories(asgs, adj, bus_lane, now, lifetime);
  std::unordered_set<int> advised = snap.already_advised;
  for (const auto& a : rule1) advised.insert(a.vehicle_id);
  auto rule2 = right_turn_fallback_advisories(adj, road, now, lifetime, advised);
  out.advisories = std::move(rule1);
  out.advisories.insert(out.advisories.end(), rule2.begin(), rule2.end());
  for (const auto& v : adj) {
    if (nonconnected_right_turn_policy(v, road) == RightTurnDirective::EnterBusLane) {
      out.advisories.push_back({v.id, bus_lane, AdvisoryKind::StaticEntry, now, now + lifetime,
                                false});
    }
  }

  if (!snap.optimizer_tick) return out;

  const HeadwayTable headways = HeadwayTable::from(pop);
  for (const auto& asg : asgs) {
    const VehicleState* leader = asg.leader_id ? find_state(snap.bus_lane, *asg.leader_id) : nullptr;
    const VehicleState* follower =
        asg.follower_id ? find_state(snap.bus_lane, *asg.follower_id) : nullptr;
    const DepartureEstimate* leader_e = leader ? find_estimate(bus_est, leader->id) : nullptr;
    const DepartureEstimate* follower_e = follower ? find_estimate(bus_est, follower->id) : nullptr;

    const double leader_td = leader_e ? leader_e->t_depart : now;
    const double follower_td = follower_e ? follower_e->t_depart : now + config.estimation_horizon;
    // The inserted vehicle's class is not known yet; assume the longer headway.
    const double tau = desired_headway(follower ? follower->cls : VehicleClass::CAV,
                                       VehicleClass::HDV, pop);
    const TemporalGap atg = compute_atg(leader_td, follower_td, tau, scenario.signal, pop);
    const auto cs = through_candidates(asg, atg, adj, adj_est, road);
    if (!cs) continue;

    RowInstance inst;
    inst.signal = scenario.signal;
    inst.lost_time = pop.startup_lost_time;
    inst.headways = headways;
    inst.lateral_safe_gap = pop.lateral_safe_gap;
    inst.lateral_comfort_decel = pop.lateral_comfort_decel;
    inst.no_change_boundary = road.no_change_boundary();
    inst.windows = atg.windows;
    inst.bus_leader = leader ? anchor_of(*leader, leader_td) : detector_anchor(snap.bus_lane_detection);
    if (follower) inst.bus_follower = anchor_of(*follower, follower_td);

    const auto first = std::find_if(adj.begin(), adj.end(),
                                    [&](const VehicleState& v) { return v.id == cs->members.front(); });
    if (first != adj.begin()) {
      const VehicleState& ahead = *(first - 1);
      inst.general_leader = anchor_of(ahead, find_estimate(adj_est, ahead.id)->t_depart);
    } else {
      inst.general_leader = detector_anchor(snap.adjacent_detection);
    }
    for (int id : cs->members) {
      const VehicleState* v = find_state(adj, id);
      const DepartureEstimate* e = find_estimate(adj_est, id);
      RowCandidate c;
      c.vehicle_id = id;
      c.pos = v->pos;
      c.speed = v->speed;
      c.cls = v->cls;
      c.length = v->length;
      c.t_free_general = e->t_free;
      c.t_free_bus = free_flow_departure(now, v->pos, v->speed, road, pop);
      inst.candidates.push_back(c);
    }

    RowSolution sol = solve_bnb(inst);
    std::unordered_set<int> moved;
    for (std::size_t k = 0; k < sol.x.size(); ++k) {
      if (sol.x[k] != 1) continue;
      const int id = inst.candidates[k].vehicle_id;
      moved.insert(id);
      out.advisories.push_back({id, bus_lane, AdvisoryKind::ThroughOptimized, now, now + lifetime,
                                false});
      out.audit.push_back({now, id, asg.follower_id, sol.t_bus[k], follower_td, tau});
    }
    out.instances.push_back(std::move(inst));
    out.solutions.push_back(std::move(sol));

    if (!moved.empty()) {
      std::erase_if(adj, [&](const VehicleState& v) { return moved.contains(v.id); });
      for (std::size_t i = 0; i < adj.size(); ++i) adj[i].order = static_cast<int>(i) + 1;
      adj_est = estimate_lane(adj, {adjacent, snap.adjacent_detection}, scenario, now);
    }
  }
  return out;
}

std::vector<Advisory> EblController::on_tick(const Simulation& sim) {
  const auto& road = scenario_.road;
  const double now = sim.now();
  const double threshold = road.stop_bar() - road.right_turn_fallback_dist;
  std::vector<Advisory> out;
  for (int lane = 0; lane < road.bus_lane_index; ++lane) {
    for (const auto& v : sim.lane_states(lane)) {
      if (general_right_turn(v) && v.pos >= threshold) {
        out.push_back({v.id, road.bus_lane_index, AdvisoryKind::StaticEntry, now,
                       now + 2.0 * scenario_.demand.sim_dt, false});
      }
    }
  }
  return out;
}

bool BlidpController::in_clearance(const Simulation& sim, double pos) const {
  for (const auto& v : sim.vehicles()) {
    if (v.cls != VehicleClass::Bus || v.crossed() || v.lane != scenario_.road.bus_lane_index) {
      continue;
    }
    if (pos >= v.pos && pos <= v.pos + config_.clearance_dist) return true;
  }
  return false;
}

std::vector<Advisory> BlidpController::on_tick(const Simulation& sim) {
  const auto& road = scenario_.road;
  const double now = sim.now();
  const double expiry = now + 2.0 * scenario_.demand.sim_dt;
  const double approach = road.stop_bar() - road.right_turn_fallback_dist;
  std::vector<Advisory> out;

  const auto bus_lane = sim.lane_states(road.bus_lane_index);
  for (const auto& v : bus_lane) {
    if (!is_general(v.cls) || !v.connected) continue;
    if (v.movement == Movement::RightTurn && v.pos >= approach) continue;
    double closest = kPosInf;
    for (const auto& b : bus_lane) {
      if (b.cls == VehicleClass::Bus && v.pos > b.pos && v.pos - b.pos <= config_.clearance_dist) {
        closest = std::min(closest, v.pos - b.pos);
      }
    }
    if (closest < kPosInf) {
      out.push_back({v.id, road.adjacent_general_lane(), AdvisoryKind::ClearanceExit, now, expiry,
                     closest <= config_.urgent_within});
    }
  }

  for (int lane = 0; lane < road.bus_lane_index; ++lane) {
    for (const auto& v : sim.lane_states(lane)) {
      if (!general_right_turn(v)) continue;
      const bool free_entry = v.connected && !in_clearance(sim, v.pos);
      if (free_entry || v.pos >= approach) {
        out.push_back({v.id, road.bus_lane_index, AdvisoryKind::StaticEntry, now, expiry, false});
      }
    }
  }
  return out;
}

bool BlidpController::permits_bus_lane_entry(const Simulation& sim, const SimVehicle& v) const {
  return v.connected && is_general(v.cls) && !in_clearance(sim, v.pos);
}

std::vector<Advisory> DstpController::on_tick(const Simulation& sim) {
  const auto& road = scenario_.road;
  DstpSnapshot snap;
  snap.now = sim.now();
  snap.optimizer_tick = sim.on_optimizer_tick();
  snap.bus_lane = sim.lane_states(road.bus_lane_index);
  snap.adjacent_lane = sim.lane_states(road.adjacent_general_lane());
  snap.bus_lane_detection = sim.last_detection(road.bus_lane_index);
  snap.adjacent_detection = sim.last_detection(road.adjacent_general_lane());
  for (const auto& [id, a] : sim.advisories()) {
    if (a.kind == AdvisoryKind::RightTurnGap || a.kind == AdvisoryKind::RightTurnFallback) {
      snap.already_advised.insert(id);
    }
  }
  DstpDecision d = dstp_decide(snap, scenario_, config_);
  optimizer_calls_ += d.solutions.size();
  audit_.insert(audit_.end(), d.audit.begin(), d.audit.end());
  return std::move(d.advisories);
}

std::unique_ptr<Controller> make_controller(const ControllerConfig& config, const Scenario& s) {
  validate(config, s);
  switch (config.kind) {
    case StrategyKind::EBL: return std::make_unique<EblController>(s);
    case StrategyKind::BLIDP: return std::make_unique<BlidpController>(s, config);
    case StrategyKind::DSTP: return std::make_unique<DstpController>(s, config);
  }
  return nullptr;
}

}  // namespace buslane
