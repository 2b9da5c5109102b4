#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "buslane/experiment.hpp"
#include "buslane/metrics.hpp"
#include "buslane/microsim.hpp"
#include "oracles.hpp"

using namespace buslane;

namespace {

Scenario quiet_scenario() {
  Scenario s;
  s.demand.vc_ratio = 0.0;
  s.demand.right_turn_ratio = 0.0;
  s.demand.sim_duration = 400.0;
  s.demand.warmup = 0.0;
  return s;
}

SimOptions no_buses() {
  SimOptions o;
  o.spawn_buses = false;
  return o;
}

void advance_to(Simulation& sim, double t) {
  while (sim.now() < t - 1e-9) sim.step();
}

const TripRecord* trip_of(const Simulation& sim, int id) {
  for (const auto& t : sim.trips()) {
    if (t.vehicle_id == id) return &t;
  }
  return nullptr;
}

Scenario demand_scenario(double vc, double duration) {
  Scenario s = oracle::stop_scenario();
  s.demand.vc_ratio = vc;
  s.demand.sim_duration = duration;
  s.demand.warmup = 0.0;
  return s;
}

}  // namespace

TEST(Simulation, EmptyWorldTicks) {
  NullController ctl;
  Simulation sim(quiet_scenario(), ctl, no_buses());
  sim.step();
  EXPECT_EQ(sim.tick(), 1);
  EXPECT_DOUBLE_EQ(sim.now(), 0.5);
  EXPECT_TRUE(sim.vehicles().empty());
  EXPECT_EQ(sim.outside_queue(), 0u);
}

TEST(Simulation, RequiresCapacityWhenDemandPositive) {
  NullController ctl;
  Scenario s = quiet_scenario();
  s.demand.vc_ratio = 0.5;
  EXPECT_THROW(Simulation(s, ctl), ValidationError);
}

TEST(Simulation, LaneChangeIntoEmptyLane) {
  NullController ctl;
  Simulation sim(quiet_scenario(), ctl, no_buses());
  const int id = sim.insert_vehicle({VehicleClass::CAV, Movement::Through, 1, 300.0, 10.0});
  EXPECT_TRUE(sim.attempt_lane_change(id, 2, false));
  EXPECT_EQ(sim.find(id)->lane, 2);
}

TEST(Simulation, LaneChangeRejectedWithCloseFollower) {
  NullController ctl;
  Simulation sim(quiet_scenario(), ctl, no_buses());
  const int id = sim.insert_vehicle({VehicleClass::CAV, Movement::Through, 1, 300.0, 10.0});
  // Follower front bumper 3 m behind the changer's rear.
  sim.insert_vehicle({VehicleClass::CAV, Movement::Through, 2, 292.0, 10.0});
  EXPECT_FALSE(sim.attempt_lane_change(id, 2, false));
  EXPECT_EQ(sim.find(id)->lane, 1);
}

TEST(Simulation, LaneChangeRejectedInNoChangeZone) {
  NullController ctl;
  Simulation sim(quiet_scenario(), ctl, no_buses());
  const int id = sim.insert_vehicle({VehicleClass::CAV, Movement::Through, 1, 675.0, 10.0});
  EXPECT_FALSE(sim.attempt_lane_change(id, 2, true));
}

TEST(Simulation, LaneChangeOnlyToNeighbor) {
  NullController ctl;
  Simulation sim(quiet_scenario(), ctl, no_buses());
  const int id = sim.insert_vehicle({VehicleClass::CAV, Movement::Through, 0, 300.0, 10.0});
  EXPECT_FALSE(sim.attempt_lane_change(id, 2, false));
  EXPECT_FALSE(sim.attempt_lane_change(id, 3, false));
}

TEST(Simulation, LoneBusCrossesAtFreeFlow) {
  NullController ctl;
  Simulation sim(quiet_scenario(), ctl, no_buses());
  advance_to(sim, 60.0);
  const int id = sim.insert_vehicle({VehicleClass::Bus, Movement::Through, 2, 300.0, 13.89});
  advance_to(sim, 150.0);
  const TripRecord* t = trip_of(sim, id);
  ASSERT_NE(t, nullptr);
  EXPECT_NEAR(t->exit_s, 60.0 + 400.0 / 13.89, 0.5 + 1e-9);
  EXPECT_EQ(t->stops, 0);
}

TEST(Simulation, StopsForRedAndLeavesOnGreen) {
  NullController ctl;
  Simulation sim(quiet_scenario(), ctl, no_buses());
  const int id = sim.insert_vehicle({VehicleClass::CAV, Movement::Through, 1, 300.0, 13.89});
  advance_to(sim, 120.0);
  const TripRecord* t = trip_of(sim, id);
  ASSERT_NE(t, nullptr);
  EXPECT_GE(t->exit_s, 60.0);
  EXPECT_EQ(t->stops, 1);
  EXPECT_EQ(sim.stats().red_violations, 0);
}

TEST(Simulation, FullConnectivityHasNoHumanDrivers) {
  Scenario s = demand_scenario(0.6, 600.0);
  s.demand.cpr = 1.0;
  NullController ctl;
  Simulation sim(s, ctl);
  sim.run();
  ASSERT_FALSE(sim.trips().empty());
  for (const auto& t : sim.trips()) EXPECT_NE(t.cls, VehicleClass::HDV);
}

TEST(Simulation, NoRightTurnsWhenRatioZero) {
  Scenario s = demand_scenario(0.6, 600.0);
  s.demand.right_turn_ratio = 0.0;
  NullController ctl;
  Simulation sim(s, ctl);
  sim.run();
  ASSERT_FALSE(sim.trips().empty());
  for (const auto& t : sim.trips()) EXPECT_EQ(t.movement, Movement::Through);
}

TEST(Simulation, ArrivalsMatchDemand) {
  double generated = 0.0;
  double expected = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Scenario s = demand_scenario(0.8, 1800.0);
    s.demand.seed = seed;
    NullController ctl;
    SimOptions o = no_buses();
    Simulation sim(s, ctl, o);
    sim.run();
    generated += sim.stats().entered + static_cast<double>(sim.outside_queue());
    expected += 0.8 * *s.demand.capacity_vph * 0.5;
  }
  EXPECT_NEAR(generated / expected, 1.0, 0.05);
}

TEST(Simulation, BusesFollowHeadway) {
  Scenario s = demand_scenario(0.3, 1800.0);
  s.road.bus_stop_pos.reset();
  NullController ctl;
  Simulation sim(s, ctl);
  sim.run();
  const auto buses = std::count_if(sim.trips().begin(), sim.trips().end(),
                                   [](const TripRecord& t) { return t.cls == VehicleClass::Bus; });
  EXPECT_NEAR(static_cast<double>(buses), 1800.0 / s.demand.bus_headway_mean, 4.0);
}

TEST(Simulation, SafeUnderModerateDemand) {
  Scenario s = demand_scenario(0.9, 900.0);
  for (StrategyKind k : {StrategyKind::EBL, StrategyKind::BLIDP, StrategyKind::DSTP}) {
    const RunResult r = run_single(s, k, 3);
    EXPECT_EQ(r.red_violations, 0) << to_string(k);
    EXPECT_EQ(r.spacing_violations, 0) << to_string(k);
  }
}

TEST(Simulation, SameSeedSameTrips) {
  const Scenario s = demand_scenario(1.0, 900.0);
  std::ostringstream a, b, c;
  run_single(s, StrategyKind::DSTP, 9, {nullptr, &a});
  run_single(s, StrategyKind::DSTP, 9, {nullptr, &b});
  run_single(s, StrategyKind::DSTP, 10, {nullptr, &c});
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
}

TEST(Simulation, TrajectoryHasHeaderAndRows) {
  Scenario s = demand_scenario(0.5, 200.0);
  std::ostringstream traj;
  run_single(s, StrategyKind::EBL, 1, {&traj, nullptr});
  std::istringstream in(traj.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kTrajectoryHeader);
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
}
