#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "buslane/experiment.hpp"
#include "buslane/metrics.hpp"
#include "oracles.hpp"

using namespace buslane;

namespace {

TripRecord trip(VehicleClass cls, Movement m, double entry, double exit, int stops = 0) {
  TripRecord t;
  t.cls = cls;
  t.movement = m;
  t.entry_s = entry;
  t.exit_s = exit;
  t.stops = stops;
  return t;
}

}  // namespace

TEST(Delay, FreeFlowTripHasNone) {
  const Scenario s;
  const double ff = 700.0 / 13.89;
  EXPECT_NEAR(compute_delay(trip(VehicleClass::CAV, Movement::Through, 100.0, 100.0 + ff), s), 0.0,
              1e-9);
  EXPECT_NEAR(compute_delay(trip(VehicleClass::HDV, Movement::Through, 100.0, 100.0 + ff + 11.6), s),
              11.6, 1e-9);
  // Faster than free flow is floored.
  EXPECT_DOUBLE_EQ(compute_delay(trip(VehicleClass::CAV, Movement::Through, 0.0, 40.0), s), 0.0);
}

TEST(Delay, BusFreeFlowIncludesStop) {
  const Scenario s = oracle::stop_scenario();
  const double v = 13.89;
  const double ff = 700.0 / v + v / (2.0 * 2.0) + v / (2.0 * 2.0) + 20.0;
  EXPECT_NEAR(free_flow_travel_time(VehicleClass::Bus, s), ff, 1e-9);
  EXPECT_NEAR(free_flow_travel_time(VehicleClass::CAV, s), 700.0 / v, 1e-9);
  EXPECT_NEAR(compute_delay(trip(VehicleClass::Bus, Movement::Through, 10.0, 10.0 + ff + 3.0), s), 3.0,
              1e-9);
  Scenario no_stop = s;
  no_stop.road.bus_stop_pos.reset();
  EXPECT_NEAR(free_flow_travel_time(VehicleClass::Bus, no_stop), 700.0 / v, 1e-9);
}

TEST(Percentile, LinearBetweenOrderStatistics) {
  EXPECT_DOUBLE_EQ(percentile({4.0, 1.0, 3.0, 2.0}, 0.5), 2.5);
  EXPECT_NEAR(percentile({4.0, 1.0, 3.0, 2.0}, 0.9), 3.7, 1e-12);
  EXPECT_DOUBLE_EQ(percentile({7.0}, 0.9), 7.0);
  EXPECT_DOUBLE_EQ(percentile({}, 0.5), 0.0);
}

TEST(GroupMetrics, SplitsAndSkipsWarmup) {
  Scenario s;
  s.demand.sim_duration = 3900.0;
  s.demand.warmup = 300.0;  // one measured hour
  const double ff = 700.0 / 13.89;
  std::vector<TripRecord> trips = {
      trip(VehicleClass::Bus, Movement::Through, 400.0, 400.0 + ff + 10.0, 1),
      trip(VehicleClass::CAV, Movement::Through, 400.0, 400.0 + ff + 2.0, 0),
      trip(VehicleClass::HDV, Movement::Through, 500.0, 500.0 + ff + 4.0, 1),
      trip(VehicleClass::CHV, Movement::RightTurn, 500.0, 500.0 + ff, 0),
      trip(VehicleClass::CAV, Movement::Through, 100.0, 290.0, 3),  // before warmup ends
  };
  const auto g = group_metrics(trips, s);
  const auto& bus = g[static_cast<std::size_t>(TripGroup::Bus)];
  const auto& thr = g[static_cast<std::size_t>(TripGroup::Through)];
  const auto& rt = g[static_cast<std::size_t>(TripGroup::RightTurn)];
  EXPECT_EQ(bus.trips, 1);
  EXPECT_NEAR(bus.mean_delay, 10.0, 1e-9);
  EXPECT_EQ(thr.trips, 2);
  EXPECT_NEAR(thr.mean_delay, 3.0, 1e-9);
  EXPECT_DOUBLE_EQ(thr.mean_stops, 0.5);
  EXPECT_DOUBLE_EQ(thr.throughput_vph, 2.0);
  EXPECT_EQ(rt.trips, 1);
  EXPECT_NEAR(rt.mean_delay, 0.0, 1e-9);
}

TEST(GroupMetrics, TripsAreConserved) {
  Scenario s = oracle::stop_scenario();
  s.demand.sim_duration = 900.0;
  NullController ctl;
  Simulation sim(s, ctl);
  sim.run();
  const auto g = group_metrics(sim.trips(), s);
  int counted = 0;
  for (const auto& t : sim.trips()) counted += t.exit_s >= s.demand.warmup ? 1 : 0;
  EXPECT_EQ(g[0].trips + g[1].trips + g[2].trips, counted);
  const double hours = (s.demand.sim_duration - s.demand.warmup) / 3600.0;
  EXPECT_NEAR(g[0].throughput_vph + g[1].throughput_vph + g[2].throughput_vph, counted / hours,
              1e-9);
  // Every entered vehicle either crossed or is still on the road.
  EXPECT_EQ(static_cast<std::size_t>(sim.stats().entered),
            sim.trips().size() + static_cast<std::size_t>(std::count_if(
                                     sim.vehicles().begin(), sim.vehicles().end(),
                                     [](const SimVehicle& v) { return !v.crossed(); })));
}

TEST(TripCsv, HeaderAndRow) {
  const Scenario s;
  std::ostringstream out;
  std::vector<TripRecord> trips = {trip(VehicleClass::CAV, Movement::RightTurn, 1.0, 61.0, 1)};
  trips[0].vehicle_id = 42;
  write_trip_csv(out, trips, s);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kTripHeader);
  std::getline(in, line);
  EXPECT_EQ(line, "42,CAV,RightTurn,1.000,61.000,9.604,1");
}

TEST(Aggregate, StudentTInterval) {
  MatrixConfig cfg;
  cfg.strategies = {StrategyKind::DSTP};
  cfg.seeds = {1, 2, 3, 4, 5};
  CellSpec only;
  only.label = "only";
  cfg.cells = {only};
  std::vector<MatrixRun> runs;
  for (int i = 0; i < 5; ++i) {
    MatrixRun r;
    r.strategy = StrategyKind::DSTP;
    r.seed = static_cast<std::uint64_t>(i + 1);
    r.result.groups[0].mean_delay = 10.0 + 2.0 * i;
    runs.push_back(r);
  }
  runs[4].result.ok = false;  // failed runs are left out
  runs[4].result.groups[0].mean_delay = 1000.0;
  const auto table = aggregate(cfg, runs);
  const Aggregate* a = find_aggregate(table, 0, StrategyKind::DSTP, "bus_mean_delay_s");
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->n, 4u);
  EXPECT_DOUBLE_EQ(a->mean, 13.0);
  // sample sd of 10, 12, 14, 16; t(0.975, 3) = 3.182446
  const double sd = std::sqrt(20.0 / 3.0);
  EXPECT_NEAR(a->ci95, 3.182446 * sd / 2.0, 1e-5);
  EXPECT_EQ(find_aggregate(table, 0, StrategyKind::EBL, "bus_mean_delay_s"), nullptr);
}
