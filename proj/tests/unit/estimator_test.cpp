#include <gtest/gtest.h>

#include "buslane/estimator.hpp"
#include "oracles.hpp"

using namespace buslane;

namespace {

constexpr double kVd = 13.89;

}  // namespace

TEST(FreeFlowDeparture, CruisingFromEntry) {
  const Scenario s;
  EXPECT_NEAR(free_flow_departure(0.0, 0.0, kVd, s.road, s.vehicles), 700.0 / kVd, 1e-9);
  EXPECT_NEAR(free_flow_departure(0.0, 0.0, kVd, s.road, s.vehicles), 50.40, 0.005);
}

TEST(FreeFlowDeparture, StandingStartMatchesHandKinematics) {
  const Scenario s;
  const double want = oracle::travel_time(700.0, 0.0, kVd, s.vehicles.car_accel);
  EXPECT_NEAR(free_flow_departure(0.0, 0.0, 0.0, s.road, s.vehicles), want, 1e-9);
  EXPECT_NEAR(want, 52.71, 0.005);
}

TEST(FreeFlowDeparture, AtStopBar) {
  const Scenario s;
  EXPECT_DOUBLE_EQ(free_flow_departure(10.0, 700.0, 3.0, s.road, s.vehicles), 10.0);
}

TEST(FreeFlowDeparture, ShortDistanceNeverReachesLimit) {
  EXPECT_NEAR(kinematic_travel_time(6.0, 0.0, kVd, 3.0), oracle::travel_time(6.0, 0.0, kVd, 3.0),
              1e-12);
}

TEST(DesiredHeadway, ByPair) {
  const VehiclePopulation pop;
  EXPECT_NEAR(desired_headway(VehicleClass::CAV, VehicleClass::CAV, pop), 0.7, 1e-12);
  EXPECT_NEAR(desired_headway(VehicleClass::CAV, VehicleClass::HDV, pop), 1.3, 1e-12);
  EXPECT_NEAR(desired_headway(VehicleClass::HDV, VehicleClass::CAV, pop), 2.0, 1e-12);
  EXPECT_NEAR(desired_headway(VehicleClass::Bus, VehicleClass::CAV, pop), 0.7, 1e-12);
}

TEST(UnsignalizedDeparture, MaxRule) {
  EXPECT_DOUBLE_EQ(unsignalized_departure(40.0, 2.0, 50.4), 50.4);
  EXPECT_DOUBLE_EQ(unsignalized_departure(60.0, 1.3, 50.4), 61.3);
  EXPECT_DOUBLE_EQ(unsignalized_departure(50.0, 2.0, 50.4), 52.0);
  EXPECT_DOUBLE_EQ(unsignalized_departure(kNegInf, 2.0, 50.4), 50.4);
}

TEST(SignalizedDeparture, MatchesCycleScan) {
  const SignalPlan p;
  for (double t : {30.0, 70.0, 130.0, 0.0, 59.99, 60.0, 99.99, 100.0, 345.6}) {
    EXPECT_NEAR(signalized_departure(t, p, 2.0, false), oracle::release(t, 100.0, 60.0, 2.0), 1e-9)
        << "t = " << t;
  }
  EXPECT_DOUBLE_EQ(signalized_departure(30.0, p, 2.0, false), 62.0);
  EXPECT_DOUBLE_EQ(signalized_departure(70.0, p, 2.0, false), 70.0);
  EXPECT_DOUBLE_EQ(signalized_departure(130.0, p, 2.0, false), 162.0);
}

TEST(SignalizedDeparture, RightTurnExempt) {
  EXPECT_DOUBLE_EQ(signalized_departure(30.0, SignalPlan{}, 2.0, true), 30.0);
}

TEST(BusStopDeparture, DwellingBusReleasedAtGreen) {
  const Scenario s = oracle::stop_scenario();
  const auto d = bus_stop_departure(0.0, 400.0, 0.0, kNegInf, 0.7, 20.0, s.road, s.vehicles,
                                    s.signal, 2.0);
  const double restart = oracle::travel_time(300.0, 0.0, kVd, s.vehicles.bus_accel);
  EXPECT_NEAR(d.t_unsignalized, 20.0 + restart, 1e-9);
  EXPECT_NEAR(d.t_unsignalized, 45.07, 0.01);
  EXPECT_DOUBLE_EQ(d.t_depart, 62.0);
}

TEST(BusStopDeparture, ZeroDwellReducesToFreeFlowWithStop) {
  const Scenario s = oracle::stop_scenario();
  const auto d = bus_stop_departure(0.0, 400.0, 0.0, kNegInf, 0.7, 0.0, s.road, s.vehicles,
                                    s.signal, 2.0);
  EXPECT_NEAR(d.t_unsignalized, oracle::travel_time(300.0, 0.0, kVd, s.vehicles.bus_accel), 1e-9);
}

TEST(BusStopDeparture, LeaderDominates) {
  const Scenario s = oracle::stop_scenario();
  const auto d = bus_stop_departure(0.0, 400.0, 0.0, 100.0, 0.7, 20.0, s.road, s.vehicles,
                                    s.signal, 2.0);
  EXPECT_NEAR(d.t_unsignalized, 100.7, 1e-9);
  EXPECT_DOUBLE_EQ(d.t_depart, 162.0);
}

TEST(EstimateLane, EmptyLane) {
  const Scenario s;
  EXPECT_TRUE(estimate_lane({}, {1, kNegInf}, s, 0.0).empty());
}

TEST(EstimateLane, BusLaneSkipsVehiclesBehindAnchoringBus) {
  Scenario s = oracle::stop_scenario();
  std::vector<VehicleState> lane = {
      oracle::vehicle(1, VehicleClass::CAV, 600.0, kVd, Movement::Through, 2),
      oracle::vehicle(2, VehicleClass::Bus, 200.0, kVd, Movement::Through, 2),
      oracle::vehicle(3, VehicleClass::CAV, 100.0, kVd, Movement::Through, 2),
  };
  oracle::order_lane(lane);
  const auto est = estimate_lane(lane, {2, kNegInf}, s, 0.0);
  std::vector<int> ids;
  for (const auto& e : est) ids.push_back(e.vehicle_id);
  EXPECT_EQ(ids, (std::vector<int>{1, 2}));
}

TEST(EstimateLane, QueueReleasedAtGreenKeepsHeadways) {
  const Scenario s;
  std::vector<VehicleState> lane = {
      oracle::vehicle(1, VehicleClass::HDV, 650.0),
      oracle::vehicle(2, VehicleClass::CAV, 620.0),
      oracle::vehicle(3, VehicleClass::CHV, 590.0),
  };
  oracle::order_lane(lane);
  const auto est = estimate_lane(lane, {1, kNegInf}, s, 10.0);
  ASSERT_EQ(est.size(), 3u);
  EXPECT_GE(est[0].t_depart, 60.0);
  const double taus[] = {desired_headway(VehicleClass::CAV, VehicleClass::HDV, s.vehicles),
                         desired_headway(VehicleClass::CHV, VehicleClass::CAV, s.vehicles)};
  for (std::size_t i = 1; i < est.size(); ++i) {
    EXPECT_GE(est[i].t_depart - est[i - 1].t_depart, taus[i - 1] - 1e-9);
    EXPECT_GE(est[i].t_depart, 60.0);
  }
}

TEST(EstimateLane, FirstVehicleChainsOnDetector) {
  const Scenario s;
  std::vector<VehicleState> lane = {oracle::vehicle(1, VehicleClass::HDV, 690.0, kVd)};
  oracle::order_lane(lane);
  // Green at 70; free flow would arrive about 70.7, the detector saw a car at 70.
  const auto est = estimate_lane(lane, {1, 70.0}, s, 70.0);
  ASSERT_EQ(est.size(), 1u);
  EXPECT_NEAR(est[0].t_depart, 72.0, 1e-9);
}
