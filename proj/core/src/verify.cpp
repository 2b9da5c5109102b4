#include "buslane/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

namespace buslane {

namespace {

using Clock = std::chrono::steady_clock;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

VehicleClass random_general(std::mt19937_64& rng) {
  constexpr VehicleClass kinds[] = {VehicleClass::HDV, VehicleClass::CHV, VehicleClass::CAV};
  return kinds[std::uniform_int_distribution<int>(0, 2)(rng)];
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

}  // namespace

AtgCase random_atg_case(std::mt19937_64& rng) {
  AtgCase c;
  c.signal.cycle = std::round(uniform(rng, 60.0, 150.0));
  c.signal.red = std::round(c.signal.cycle * uniform(rng, 0.3, 0.7));
  c.signal.green = c.signal.cycle - c.signal.red;
  c.leader_td = uniform(rng, 0.0, 400.0);
  c.follower_td = c.leader_td + uniform(rng, -5.0, 300.0);
  c.tau = uniform(rng, 0.5, 2.5);
  c.min_window = uniform(rng, 0.0, 3.0);
  return c;
}

RowInstance random_row_instance(std::mt19937_64& rng, std::size_t k) {
  RowInstance inst;
  const double now = uniform(rng, 0.0, 300.0);
  const double v_max = 13.89;

  // Front (closest to the bar) first, at least a car length plus a gap apart.
  double pos = uniform(rng, 520.0, 680.0);
  for (std::size_t i = 0; i < k; ++i) {
    RowCandidate c;
    c.vehicle_id = static_cast<int>(i) + 1;
    c.pos = pos;
    c.speed = coin(rng, 0.05) ? 0.0 : uniform(rng, 0.5, v_max);
    c.cls = random_general(rng);
    c.length = 5.0;
    const double travel = (700.0 - c.pos) / std::max(c.speed, 2.0);
    c.t_free_general = now + travel;
    c.t_free_bus = now + travel * uniform(rng, 0.85, 1.05);
    inst.candidates.push_back(c);
    pos -= c.length + uniform(rng, 2.0, 30.0);
  }

  const double front = inst.candidates.front().pos;
  const double back = inst.candidates.back().pos;
  if (coin(rng, 0.7)) {
    LaneAnchor& a = inst.bus_leader;
    a.present = true;
    a.spatial = coin(rng, 0.8);
    a.pos = std::min(699.0, front + uniform(rng, -40.0, 60.0));
    a.speed = uniform(rng, 0.0, v_max);
    a.length = coin(rng, 0.3) ? 12.0 : 5.0;
    a.cls = coin(rng, 0.3) ? VehicleClass::Bus : random_general(rng);
    a.t_depart = now + (700.0 - a.pos) / std::max(a.speed, 2.0);
  }
  if (coin(rng, 0.7)) {
    LaneAnchor& a = inst.bus_follower;
    a.present = true;
    a.pos = back - uniform(rng, 5.0, 80.0);
    a.speed = uniform(rng, 0.0, v_max);
    a.length = 12.0;
    a.cls = VehicleClass::Bus;
    a.t_depart = now + (700.0 - a.pos) / std::max(a.speed, 2.0) + uniform(rng, 0.0, 60.0);
  }
  if (coin(rng, 0.6)) {
    LaneAnchor& a = inst.general_leader;
    a.present = true;
    a.pos = std::min(699.0, front + uniform(rng, 7.0, 40.0));
    a.speed = uniform(rng, 0.0, v_max);
    a.cls = random_general(rng);
    a.t_depart = now + (700.0 - a.pos) / std::max(a.speed, 2.0);
  }

  const double leader_td = inst.bus_leader.present ? inst.bus_leader.t_depart : now;
  const double follower_td =
      inst.bus_follower.present ? inst.bus_follower.t_depart : now + 200.0;
  inst.windows = compute_atg(leader_td, follower_td, 1.3, inst.signal, 0.5).windows;
  return inst;
}

VerifyReport verify_atg(std::size_t cases, std::uint64_t seed, double tolerance) {
  std::mt19937_64 rng(seed);
  VerifyReport rep;
  for (std::size_t i = 0; i < cases; ++i) {
    const AtgCase c = random_atg_case(rng);
    const auto t0 = Clock::now();
    const TemporalGap got = compute_atg(c.leader_td, c.follower_td, c.tau, c.signal, c.min_window);
    const double dt = seconds_since(t0);
    rep.seconds += dt;
    rep.max_seconds = std::max(rep.max_seconds, dt);
    const TemporalGap want =
        atg_brute_force(c.leader_td, c.follower_td, c.tau, c.signal, c.min_window, 0.1);
    ++rep.cases;

    bool same = got.windows.size() == want.windows.size();
    for (std::size_t w = 0; same && w < got.windows.size(); ++w) {
      same = std::abs(got.windows[w].start - want.windows[w].start) <= tolerance &&
             std::abs(got.windows[w].end - want.windows[w].end) <= tolerance;
    }
    if (!same) {
      if (rep.mismatches == 0) {
        rep.first_mismatch = fmt::format(
            "case {}: leader {} follower {} tau {} cycle {} red {}: {} windows vs {}", i,
            c.leader_td, c.follower_td, c.tau, c.signal.cycle, c.signal.red, got.windows.size(),
            want.windows.size());
      }
      ++rep.mismatches;
    }
  }
  return rep;
}

VerifyReport verify_row_opt(std::size_t cases, std::uint64_t seed, std::size_t k_min,
                            std::size_t k_max) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(k_min, k_max);
  VerifyReport rep;
  for (std::size_t i = 0; i < cases; ++i) {
    const RowInstance inst = random_row_instance(rng, size(rng));
    const auto t0 = Clock::now();
    const RowSolution got = solve_bnb(inst);
    const double dt = seconds_since(t0);
    rep.seconds += dt;
    rep.max_seconds = std::max(rep.max_seconds, dt);
    const RowSolution want = solve_exhaustive(inst);
    ++rep.cases;

    const double tol = 1e-6 * std::max(1.0, std::abs(want.objective));
    const bool same = got.status == want.status &&
                      (want.status == SolveStatus::AllInfeasible ||
                       std::abs(got.objective - want.objective) <= tol);
    if (!same) {
      if (rep.mismatches == 0) {
        rep.first_mismatch = fmt::format("case {} (K={}): bnb {} vs exhaustive {}", i,
                                         inst.size(), got.objective, want.objective);
      }
      ++rep.mismatches;
    }
  }
  return rep;
}

VerifyReport time_bnb(std::size_t cases, std::uint64_t seed, std::size_t k) {
  std::mt19937_64 rng(seed);
  VerifyReport rep;
  for (std::size_t i = 0; i < cases; ++i) {
    const RowInstance inst = random_row_instance(rng, k);
    const auto t0 = Clock::now();
    const RowSolution sol = solve_bnb(inst);
    const double dt = seconds_since(t0);
    rep.seconds += dt;
    rep.max_seconds = std::max(rep.max_seconds, dt);
    ++rep.cases;
    (void)sol;
  }
  return rep;
}

}  // namespace buslane
