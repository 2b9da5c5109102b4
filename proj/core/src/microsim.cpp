#include "buslane/microsim.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "buslane/car_following.hpp"

namespace buslane {

namespace {

constexpr double kHardGap = 1.0;           // collision cap applied after car following
constexpr double kViolationGap = 0.5;
constexpr double kDownstreamKeep = 100.0;  // vehicles stay this far past the bar as leaders
constexpr double kStopLineMargin = 0.5;
constexpr double kClearMargin = 0.25;      // seconds of green kept in hand when committing
constexpr double kLaneChangeCooldown = 1.0;
constexpr double kDiscretionaryCooldown = 5.0;
constexpr double kDiscretionaryGain = 1.0;
constexpr double kLookAhead = 100.0;
constexpr double kRightTurnLastCall = 50.0;  // built-in merge before the no-change zone
constexpr double kMergeLookahead = 80.0;     // start matching pocket traffic this far ahead
constexpr double kIdleWeight = 1.0;
constexpr double kHaltSpeed = 0.1;
constexpr double kDwellCatch = 2.0;
constexpr int kSaturatedBacklog = 4;

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

bool Controller::permits_bus_lane_entry(const Simulation&, const SimVehicle&) const {
  return false;
}

VehicleState SimVehicle::state(int order) const {
  VehicleState s;
  s.id = id;
  s.lane = lane;
  s.order = order;
  s.cls = cls;
  s.movement = movement;
  s.connected = connected;
  s.pos = pos;
  s.speed = speed;
  s.length = length;
  s.dwell_remaining = dwelling ? dwell_remaining : 0.0;
  s.stop_served = stop_served;
  return s;
}

Simulation::Simulation(Scenario scenario, Controller& controller, SimOptions options)
    : scenario_(std::move(scenario)),
      controller_(controller),
      options_(options),
      dt_(scenario_.demand.sim_dt),
      end_tick_(std::lround(scenario_.demand.sim_duration / scenario_.demand.sim_dt)),
      optimizer_stride_(
          std::max(1L, std::lround(scenario_.demand.control_interval / scenario_.demand.sim_dt))),
      lanes_(static_cast<std::size_t>(scenario_.road.lane_count_main + 1)),
      detections_(lanes_.size(), kNegInf),
      arrival_rng_(stream_seed(scenario_.demand.seed, 1)),
      bus_rng_(stream_seed(scenario_.demand.seed, 2)) {
  validate(scenario_);
  if (!options_.saturated_entry && scenario_.demand.vc_ratio > 0.0 &&
      !scenario_.demand.capacity_vph) {
    throw ValidationError("demand.capacity_vph", "capacity must be calibrated before simulating");
  }
  const auto& d = scenario_.demand;
  next_bus_time_ = uniform01(bus_rng_) * d.bus_headway_mean;
}

SimVehicle Simulation::make_vehicle(int id, VehicleClass cls, Movement movement, double arrival) {
  SimVehicle v;
  v.id = id;
  v.cls = cls;
  v.movement = movement;
  v.connected = is_connected(cls);
  v.length = cls == VehicleClass::Bus ? scenario_.vehicles.bus_len : scenario_.vehicles.car_len;
  v.arrival_time = arrival;
  v.driver_rng.seed(stream_seed(scenario_.demand.seed, 1000 + static_cast<std::uint64_t>(id)));
  return v;
}

const SimVehicle* Simulation::find(int id) const {
  for (const auto& v : vehicles_) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

SimVehicle* Simulation::find_mut(int id) {
  return const_cast<SimVehicle*>(std::as_const(*this).find(id));
}

void Simulation::rebuild_lanes() {
  for (auto& l : lanes_) l.clear();
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    lanes_[static_cast<std::size_t>(vehicles_[i].lane)].push_back(static_cast<int>(i));
  }
  for (auto& l : lanes_) {
    std::sort(l.begin(), l.end(), [&](int a, int b) {
      const auto& va = vehicles_[static_cast<std::size_t>(a)];
      const auto& vb = vehicles_[static_cast<std::size_t>(b)];
      if (va.pos != vb.pos) return va.pos > vb.pos;
      return va.id < vb.id;
    });
  }
}

int Simulation::neighbor_ahead(int lane, double pos, int self) const {
  int best = -1;
  for (int idx : lanes_[static_cast<std::size_t>(lane)]) {
    const auto& o = vehicles_[static_cast<std::size_t>(idx)];
    if (o.id == self || o.pos < pos) continue;
    if (best < 0 || o.pos < vehicles_[static_cast<std::size_t>(best)].pos) best = idx;
  }
  return best;
}

int Simulation::neighbor_behind(int lane, double pos, int self) const {
  int best = -1;
  for (int idx : lanes_[static_cast<std::size_t>(lane)]) {
    const auto& o = vehicles_[static_cast<std::size_t>(idx)];
    if (o.id == self || o.pos >= pos) continue;
    if (best < 0 || o.pos > vehicles_[static_cast<std::size_t>(best)].pos) best = idx;
  }
  return best;
}

std::vector<VehicleState> Simulation::lane_states(int lane) const {
  std::vector<const SimVehicle*> on_lane;
  for (const auto& v : vehicles_) {
    if (v.lane == lane && !v.crossed()) on_lane.push_back(&v);
  }
  std::sort(on_lane.begin(), on_lane.end(), [](const SimVehicle* a, const SimVehicle* b) {
    if (a->pos != b->pos) return a->pos > b->pos;
    return a->id < b->id;
  });
  std::vector<VehicleState> out;
  out.reserve(on_lane.size());
  for (std::size_t i = 0; i < on_lane.size(); ++i) {
    out.push_back(on_lane[i]->state(static_cast<int>(i) + 1));
  }
  return out;
}

double Simulation::last_detection(int lane) const {
  return detections_.at(static_cast<std::size_t>(lane));
}

bool Simulation::on_optimizer_tick() const { return tick_ % optimizer_stride_ == 0; }

bool Simulation::finished() const { return tick_ >= end_tick_; }

void Simulation::run() {
  while (!finished()) step();
}

int Simulation::insert_vehicle(const VehicleSeed& seed) {
  SimVehicle v = make_vehicle(next_id_++, seed.cls, seed.movement, now());
  v.lane = seed.lane;
  v.pos = seed.pos;
  v.speed = seed.speed;
  v.entry_time = now();
  v.dwell_total = seed.dwell;
  vehicles_.push_back(std::move(v));
  ++stats_.entered;
  rebuild_lanes();
  return vehicles_.back().id;
}

bool Simulation::attempt_lane_change(int id, int target_lane, bool urgent) {
  SimVehicle* v = find_mut(id);
  if (!v || v->crossed() || v->dwelling) return false;
  const auto& road = scenario_.road;
  const auto& pop = scenario_.vehicles;
  if (target_lane < 0 || target_lane > road.pocket_lane()) return false;
  if (std::abs(target_lane - v->lane) != 1) return false;
  if (v->pos > road.no_change_boundary()) return false;
  if (target_lane == road.pocket_lane() && v->pos < road.pocket_start()) return false;

  const double d_safe = pop.lateral_safe_gap;
  const double a_l = pop.lateral_comfort_decel;
  const int ahead = neighbor_ahead(target_lane, v->pos, id);
  if (ahead >= 0) {
    const auto& l = vehicles_[static_cast<std::size_t>(ahead)];
    const double gap = l.rear() - v->pos;
    const double need =
        urgent ? 0.5 * d_safe + std::max(0.0, v->speed * v->speed - l.speed * l.speed) /
                                    (2.0 * pop.car_decel)
               : d_safe + std::abs(l.speed * l.speed - v->speed * v->speed) / (2.0 * a_l);
    if (gap < need) return false;
  }
  const int behind = neighbor_behind(target_lane, v->pos, id);
  if (behind >= 0) {
    const auto& f = vehicles_[static_cast<std::size_t>(behind)];
    const double gap = v->rear() - f.pos;
    const double f_decel = f.cls == VehicleClass::Bus ? pop.bus_decel : pop.car_decel;
    const double need =
        urgent ? 0.5 * d_safe + std::max(0.0, f.speed * f.speed - v->speed * v->speed) /
                                    (2.0 * f_decel)
               : d_safe + std::abs(f.speed * f.speed - v->speed * v->speed) / (2.0 * a_l);
    if (gap < need) return false;
  }

  v->lane = target_lane;
  v->last_lane_change = now();
  ++stats_.lane_changes;
  rebuild_lanes();
  return true;
}

void Simulation::record_snapshots() {
  if (options_.snapshot_interval <= 0.0) return;
  const long stride = std::max(1L, std::lround(options_.snapshot_interval / dt_));
  if (tick_ % stride != 0) return;
  for (int lane = 0; lane <= scenario_.road.bus_lane_index; ++lane) {
    const auto states = lane_states(lane);
    if (states.empty()) continue;
    LaneContext ctx{lane, detections_[static_cast<std::size_t>(lane)]};
    for (const auto& e : estimate_lane(states, ctx, scenario_, now())) {
      samples_.push_back({e.vehicle_id, now(), e.t_depart});
    }
  }
}

void Simulation::apply_controller() {
  const double t = now();
  std::erase_if(board_, [&](const auto& kv) {
    const SimVehicle* v = find(kv.first);
    return !v || v->crossed() || kv.second.expires_at < t || v->lane == kv.second.target_lane;
  });
  for (const auto& a : controller_.on_tick(*this)) {
    const SimVehicle* v = find(a.vehicle_id);
    if (!v || v->crossed() || v->lane == a.target_lane) continue;
    board_[a.vehicle_id] = a;
    ++stats_.advisories[a.kind];
  }
}

double Simulation::lane_attractiveness(const SimVehicle& v, int lane) const {
  const int ahead = neighbor_ahead(lane, v.pos, v.id);
  if (ahead < 0) return scenario_.road.speed_limit;
  const auto& l = vehicles_[static_cast<std::size_t>(ahead)];
  if (l.rear() - v.pos > kLookAhead) return scenario_.road.speed_limit;
  return l.speed;
}

void Simulation::lane_change_phase() {
  const auto& road = scenario_.road;
  const double t = now();

  std::vector<int> ids;
  ids.reserve(board_.size());
  for (const auto& [id, a] : board_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  for (int id : ids) {
    const Advisory& a = board_.at(id);
    const SimVehicle* v = find(id);
    if (!v || v->lane == a.target_lane) continue;
    if (t - v->last_lane_change < kLaneChangeCooldown) continue;
    const int next = v->lane + (a.target_lane > v->lane ? 1 : -1);
    attempt_lane_change(id, next, a.urgent);
  }

  // Built-in right-turn behavior: reach the pocket through the bus lane.
  std::vector<int> order;
  order.reserve(vehicles_.size());
  for (const auto& v : vehicles_) order.push_back(v.id);
  std::sort(order.begin(), order.end());
  const int adjacent = road.adjacent_general_lane();
  for (int id : order) {
    const SimVehicle* v = find(id);
    if (v->movement != Movement::RightTurn || v->crossed() || v->cls == VehicleClass::Bus) continue;
    if (t - v->last_lane_change < kLaneChangeCooldown) continue;
    const bool late = v->pos >= road.no_change_boundary() - kRightTurnLastCall;
    if (v->lane == road.bus_lane_index && v->pos >= road.pocket_start()) {
      attempt_lane_change(id, road.pocket_lane(), late);
    } else if (v->lane < adjacent) {
      attempt_lane_change(id, v->lane + 1, late);
    } else if (v->lane == adjacent && late) {
      attempt_lane_change(id, road.bus_lane_index, true);
    }
  }

  if (!options_.discretionary_lane_changes) return;
  for (int id : order) {
    const SimVehicle* v = find(id);
    if (v->crossed() || v->cls == VehicleClass::Bus || v->movement != Movement::Through) continue;
    if (v->lane >= road.bus_lane_index || board_.contains(id)) continue;
    if (t - v->last_lane_change < kDiscretionaryCooldown) continue;
    if (v->pos <= 0.0 || v->pos >= road.no_change_boundary() - 10.0) continue;

    const double here = lane_attractiveness(*v, v->lane);
    int best = -1;
    double best_gain = kDiscretionaryGain;
    for (int target : {v->lane - 1, v->lane + 1}) {
      if (target < 0) continue;
      if (target == road.bus_lane_index && !controller_.permits_bus_lane_entry(*this, *v)) continue;
      const double gain = lane_attractiveness(*v, target) - here;
      if (gain >= best_gain) {
        best_gain = gain;
        best = target;
      }
    }
    if (best >= 0) attempt_lane_change(id, best, false);
  }
}

int Simulation::merge_target(const SimVehicle& v) const {
  const auto& road = scenario_.road;
  if (v.movement != Movement::RightTurn || v.cls == VehicleClass::Bus || v.crossed()) return -1;
  if (v.lane == road.bus_lane_index && v.pos >= road.pocket_start() - kMergeLookahead) {
    return road.pocket_lane();
  }
  if (v.lane == road.adjacent_general_lane() &&
      v.pos >= road.stop_bar() - road.right_turn_fallback_dist) {
    return road.bus_lane_index;
  }
  return -1;
}

std::optional<double> Simulation::obstacle_for(SimVehicle& v) const {
  if (v.crossed()) return std::nullopt;
  const auto& road = scenario_.road;
  const auto& pop = scenario_.vehicles;
  std::optional<double> stop;
  auto take = [&](double x) { stop = stop ? std::min(*stop, x) : x; };

  if (v.cls == VehicleClass::Bus && road.bus_stop_pos && !v.stop_served) take(*road.bus_stop_pos);

  if (v.movement == Movement::RightTurn && v.cls != VehicleClass::Bus) {
    if (v.lane != road.pocket_lane()) take(road.no_change_boundary() - kStopLineMargin);
    return stop;
  }

  // Through movement: commit to the green only if the bar can be cleared in time.
  const double t = now();
  const double dist = road.stop_bar() - v.pos;
  const double accel = v.cls == VehicleClass::Bus ? pop.bus_accel : pop.car_accel;
  bool clear = false;
  if (scenario_.signal.is_green(t)) {
    const double tt = kinematic_travel_time(dist, v.speed, road.speed_limit, accel);
    clear = tt <= scenario_.signal.green_remaining(t) - kClearMargin;
  }
  // One tick of travel is allowed for: the position cap stops a vehicle that
  // is still short of the line.
  const bool can_stop = v.speed * v.speed / (2.0 * pop.emergency_decel) <=
                        dist - kStopLineMargin + v.speed * dt_ + 1e-9;
  v.signal_hold = !clear && (v.signal_hold || can_stop);
  if (v.signal_hold) take(road.stop_bar() - kStopLineMargin);
  return stop;
}

void Simulation::follow_phase() {
  const auto& road = scenario_.road;
  const auto& pop = scenario_.vehicles;
  const double t = now();

  std::vector<double> v_new(vehicles_.size(), 0.0);
  std::vector<std::optional<double>> stop_at(vehicles_.size());
  for (const auto& lane : lanes_) {
    for (std::size_t k = 0; k < lane.size(); ++k) {
      const auto idx = static_cast<std::size_t>(lane[k]);
      SimVehicle& v = vehicles_[idx];
      const double dawdle = is_automated(v.cls) ? 0.0 : uniform01(v.driver_rng);
      if (v.dwelling) {
        v_new[idx] = 0.0;
        continue;
      }
      std::optional<Leader> leader;
      std::optional<VehicleClass> leader_cls;
      if (k > 0) {
        const auto& l = vehicles_[static_cast<std::size_t>(lane[k - 1])];
        leader = Leader{l.rear() - v.pos, l.speed, l.accel, l.length};
        leader_cls = l.cls;
      }
      const FollowModel model = follow_model(v.cls, leader_cls);
      const FollowParams p = follow_params(v.cls, model, pop, road.speed_limit);
      double speed = follower_speed(model, v.speed, leader, p, dt_, dawdle);

      if (const int target = merge_target(v); target >= 0) {
        // Open a lane-change gap ahead of time: keep the safe lateral gap to
        // the target-lane vehicle ahead and, approaching the pocket, to a
        // right-turning leader that will merge first.
        auto keep_clear = [&](const SimVehicle& o) {
          const double gap = o.rear() - v.pos;
          if (gap >= pop.lateral_safe_gap) return;
          const Leader side{gap - pop.lateral_safe_gap + p.min_gap, o.speed, o.accel, o.length};
          const double synced = follower_speed(model, v.speed, side, p, dt_, dawdle);
          speed = std::min(speed, std::max(synced, v.speed - p.decel * dt_));
        };
        if (const int ahead = neighbor_ahead(target, v.pos, v.id); ahead >= 0) {
          keep_clear(vehicles_[static_cast<std::size_t>(ahead)]);
        }
        if (k > 0 && target == road.pocket_lane()) {
          const auto& l = vehicles_[static_cast<std::size_t>(lane[k - 1])];
          if (l.movement == Movement::RightTurn && is_general(l.cls)) keep_clear(l);
        }
      }

      stop_at[idx] = obstacle_for(v);
      if (stop_at[idx]) {
        const Leader wall{*stop_at[idx] - v.pos + p.min_gap, 0.0, 0.0, 0.0};
        speed = std::min(speed, follower_speed(model, v.speed, wall, p, dt_, dawdle));
      }
      v_new[idx] = speed;
    }
  }

  for (const auto& lane : lanes_) {
    for (std::size_t k = 0; k < lane.size(); ++k) {
      const auto idx = static_cast<std::size_t>(lane[k]);
      SimVehicle& v = vehicles_[idx];
      double speed = v_new[idx];
      if (k > 0) {
        const auto& l = vehicles_[static_cast<std::size_t>(lane[k - 1])];
        speed = std::min(speed, std::max(0.0, (l.rear() - kHardGap - v.pos) / dt_));
      }
      if (stop_at[idx]) speed = std::min(speed, std::max(0.0, (*stop_at[idx] - v.pos) / dt_));

      const double old_pos = v.pos;
      const double old_speed = v.speed;
      v.accel = (speed - old_speed) / dt_;
      v.speed = speed;
      v.pos = old_pos + speed * dt_;

      if (!v.crossed()) {
        v.energy += std::max(0.0, speed * v.accel) * dt_;
        if (speed < kHaltSpeed) v.energy += kIdleWeight * dt_;
        if (speed < kHaltSpeed && !v.halted && !v.dwelling) {
          ++v.stops;
          v.halted = true;
        } else if (speed > 1.0) {
          v.halted = false;
        }
        if (v.lane == road.bus_lane_index && is_general(v.cls) && t >= scenario_.demand.warmup) {
          stats_.bus_lane_general_m += std::min(v.pos, road.stop_bar()) - old_pos;
        }
        if (v.pos >= road.stop_bar()) {
          const double frac = speed > 0.0 ? (road.stop_bar() - old_pos) / (speed * dt_) : 1.0;
          const double t_cross = t + dt_ * std::clamp(frac, 0.0, 1.0);
          v.crossing_time = t_cross;
          detections_[static_cast<std::size_t>(v.lane)] = t_cross;
          if (v.movement == Movement::Through && !scenario_.signal.is_green(t_cross)) {
            ++stats_.red_violations;
          }
          trips_.push_back({v.id, v.cls, v.movement, v.arrival_time, t_cross, v.stops, v.energy});
        }
      }
    }
  }

  // Bus stop service.
  if (road.bus_stop_pos) {
    for (auto& v : vehicles_) {
      if (v.cls != VehicleClass::Bus || v.stop_served) continue;
      if (v.dwelling) {
        v.dwell_remaining -= dt_;
        if (v.dwell_remaining <= 1e-9) {
          v.dwelling = false;
          v.stop_served = true;
          v.dwell_remaining = 0.0;
        }
      } else if (std::abs(v.pos - *road.bus_stop_pos) <= kDwellCatch && v.speed <= 0.5) {
        v.speed = 0.0;
        if (v.dwell_total <= 0.0) {
          v.stop_served = true;
        } else {
          v.dwelling = true;
          v.dwell_remaining = v.dwell_total;
        }
      }
    }
  }

  const double limit = road.stop_bar() + kDownstreamKeep;
  const auto before = vehicles_.size();
  std::erase_if(vehicles_, [&](const SimVehicle& v) { return v.pos > limit; });
  stats_.removed += static_cast<int>(before - vehicles_.size());
}

void Simulation::check_spacing() {
  rebuild_lanes();
  for (std::size_t lane = 0; lane < lanes_.size(); ++lane) {
    const auto& l = lanes_[lane];
    for (std::size_t k = 1; k < l.size(); ++k) {
      const auto& lead = vehicles_[static_cast<std::size_t>(l[k - 1])];
      const auto& fol = vehicles_[static_cast<std::size_t>(l[k])];
      const double gap = lead.rear() - fol.pos;
      stats_.min_spacing = std::min(stats_.min_spacing, gap);
      if (gap < kViolationGap) ++stats_.spacing_violations;
      if (gap < -1e-9) {
        throw InvariantBreach(fmt::format(
            "overlap at t={:.1f} lane {}: vehicle {} (pos {:.2f}) into vehicle {} (rear {:.2f})",
            now(), lane, fol.id, fol.pos, lead.id, lead.rear()));
      }
    }
  }
  if (stats_.entered != static_cast<int>(vehicles_.size()) + stats_.removed) {
    throw InvariantBreach(fmt::format("vehicle count drift at t={:.1f}: entered {} on road {} removed {}",
                                      now(), stats_.entered, vehicles_.size(), stats_.removed));
  }
}

void Simulation::generate_arrivals() {
  const auto& d = scenario_.demand;
  const double arrival = now() + dt_;
  auto draw_general = [&] {
    const double u_conn = uniform01(arrival_rng_);
    const double u_split = uniform01(arrival_rng_);
    const double u_turn = uniform01(arrival_rng_);
    VehicleClass cls = VehicleClass::HDV;
    if (u_conn < d.cpr) cls = u_split < d.cav_chv_split ? VehicleClass::CAV : VehicleClass::CHV;
    const Movement m = u_turn < d.right_turn_ratio ? Movement::RightTurn : Movement::Through;
    general_queue_.push_back({next_id_++, cls, m, arrival, 0.0});
  };

  if (options_.saturated_entry) {
    while (general_queue_.size() < kSaturatedBacklog) draw_general();
  } else if (d.vc_ratio > 0.0) {
    const double rate = d.vc_ratio * *d.capacity_vph / 3600.0;
    std::poisson_distribution<int> arrivals(rate * dt_);
    const int n = arrivals(arrival_rng_);
    for (int i = 0; i < n; ++i) draw_general();
  }

  if (!options_.spawn_buses) return;
  while (next_bus_time_ < arrival) {
    double dwell = 0.0;
    if (scenario_.road.bus_stop_pos) {
      dwell = std::max(0.0, std::normal_distribution<double>(d.dwell_mean, d.dwell_std)(bus_rng_));
    }
    bus_queue_.push_back({next_id_++, VehicleClass::Bus, Movement::Through,
                          std::max(next_bus_time_, 0.0), dwell});
    next_bus_time_ +=
        std::max(5.0, std::normal_distribution<double>(d.bus_headway_mean, d.bus_headway_std)(bus_rng_));
  }
}

bool Simulation::try_insert(const Pending& p, int lane) {
  const auto& pop = scenario_.vehicles;
  const auto& road = scenario_.road;
  const auto& l = lanes_[static_cast<std::size_t>(lane)];
  double v0 = road.speed_limit;
  const double s0 = is_automated(p.cls) ? pop.min_gap_automated : pop.min_gap_human;
  if (!l.empty()) {
    const auto& last = vehicles_[static_cast<std::size_t>(l.back())];
    const double gap = last.rear();
    if (gap < s0 + 0.5) return false;
    v0 = std::min(v0, krauss_safe_speed(gap - s0, last.speed, last.speed, pop.car_decel, pop.tau_h));
  }
  SimVehicle v = make_vehicle(p.id, p.cls, p.movement, p.arrival);
  v.lane = lane;
  v.pos = 0.0;
  v.speed = v0;
  v.entry_time = now() + dt_;
  v.dwell_total = p.dwell;
  vehicles_.push_back(std::move(v));
  lanes_[static_cast<std::size_t>(lane)].push_back(static_cast<int>(vehicles_.size() - 1));
  ++stats_.entered;
  return true;
}

void Simulation::spawn_phase() {
  generate_arrivals();
  rebuild_lanes();
  const auto& road = scenario_.road;

  while (!bus_queue_.empty() && try_insert(bus_queue_.front(), road.bus_lane_index)) {
    bus_queue_.pop_front();
  }

  auto entry_gap = [&](int lane) {
    const auto& l = lanes_[static_cast<std::size_t>(lane)];
    return l.empty() ? kPosInf : vehicles_[static_cast<std::size_t>(l.back())].rear();
  };
  while (!general_queue_.empty()) {
    const Pending& p = general_queue_.front();
    int lane = road.adjacent_general_lane();
    if (options_.force_spawn_lane) {
      lane = *options_.force_spawn_lane;
    } else if (p.movement == Movement::Through) {
      lane = 0;
      for (int j = 1; j < road.bus_lane_index; ++j) {
        if (entry_gap(j) > entry_gap(lane)) lane = j;
      }
    }
    if (!try_insert(p, lane)) break;
    general_queue_.pop_front();
  }
}

void Simulation::write_trajectory() const {
  if (!options_.trajectory) return;
  auto& out = *options_.trajectory;
  std::vector<const SimVehicle*> rows;
  rows.reserve(vehicles_.size());
  for (const auto& v : vehicles_) {
    if (!v.crossed() || v.crossing_time.value() > now() - dt_) rows.push_back(&v);
  }
  std::sort(rows.begin(), rows.end(),
            [](const SimVehicle* a, const SimVehicle* b) { return a->id < b->id; });
  for (const SimVehicle* v : rows) {
    std::string_view adv;
    if (auto it = board_.find(v->id); it != board_.end()) adv = to_string(it->second.kind);
    out << fmt::format("{},{:.1f},{},{},{},{},{:.3f},{:.3f},{}\n", tick_, now(), v->id,
                       to_string(v->cls), to_string(v->movement), v->lane, v->pos, v->speed, adv);
  }
}

void Simulation::step() {
  rebuild_lanes();
  record_snapshots();
  apply_controller();
  lane_change_phase();
  rebuild_lanes();
  follow_phase();
  rebuild_lanes();
  spawn_phase();
  ++tick_;
  ++stats_.ticks;
  check_spacing();
  write_trajectory();
}

}  // namespace buslane
