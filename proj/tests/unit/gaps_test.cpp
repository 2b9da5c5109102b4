#include <gtest/gtest.h>

#include <random>

#include "buslane/gaps.hpp"
#include "buslane/verify.hpp"
#include "oracles.hpp"

using namespace buslane;

namespace {

constexpr int kBusLane = 2;

VehicleState on_bus_lane(int id, VehicleClass cls, double pos, double speed = 13.89) {
  return oracle::vehicle(id, cls, pos, speed, Movement::Through, kBusLane);
}

void expect_windows(const TemporalGap& got, std::vector<TimeWindow> want, double tol = 1e-9) {
  ASSERT_EQ(got.windows.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_NEAR(got.windows[i].start, want[i].start, tol) << "window " << i;
    EXPECT_NEAR(got.windows[i].end, want[i].end, tol) << "window " << i;
  }
}

}  // namespace

TEST(MinGap, Defaults) {
  VehiclePopulation pop;
  EXPECT_DOUBLE_EQ(min_gap(pop), 17.0);
  pop.asg_margin_front = pop.asg_margin_rear = 0.0;
  EXPECT_DOUBLE_EQ(min_gap(pop), 5.0);
}

TEST(FindAsgs, EmptyLaneIsOneGap) {
  const Scenario s;
  const auto gaps = find_asgs({}, s.road, s.vehicles);
  ASSERT_EQ(gaps.size(), 1u);
  EXPECT_TRUE(gaps[0].leader_is_virtual());
  EXPECT_TRUE(gaps[0].follower_is_virtual());
  EXPECT_DOUBLE_EQ(gaps[0].rear_pos, 0.0);
  EXPECT_DOUBLE_EQ(gaps[0].front_pos, 700.0);
}

TEST(FindAsgs, ShortGapDropped) {
  const Scenario s;
  // Bumper gap 12 m between the two cars.
  std::vector<VehicleState> lane = {on_bus_lane(1, VehicleClass::CAV, 500.0),
                                    on_bus_lane(2, VehicleClass::CAV, 483.0)};
  oracle::order_lane(lane);
  for (const auto& g : find_asgs(lane, s.road, s.vehicles)) {
    EXPECT_FALSE(g.leader_id == 1 && g.follower_id == 2);
  }
}

TEST(FindAsgs, DwellingBusLimitsRange) {
  const Scenario s = oracle::stop_scenario();
  auto bus = on_bus_lane(1, VehicleClass::Bus, 400.0, 0.0);
  bus.dwell_remaining = 12.0;
  std::vector<VehicleState> lane = {on_bus_lane(2, VehicleClass::CAV, 650.0), bus};
  oracle::order_lane(lane);
  const auto gaps = find_asgs(lane, s.road, s.vehicles);
  ASSERT_EQ(gaps.size(), 2u);
  for (const auto& g : gaps) EXPECT_GE(g.rear_pos, 400.0);
  EXPECT_EQ(gaps[1].follower_id, 1);
  EXPECT_DOUBLE_EQ(recognition_start(lane, s.road), 400.0);
}

TEST(ComputeAtg, TwoWindowsAgainstGridReference) {
  const SignalPlan p;
  const auto got = compute_atg(70.0, 165.0, 1.5, p, 0.0);
  expect_windows(got, {{70.0, 100.0}, {160.0, 163.5}});
  expect_windows(atg_brute_force(70.0, 165.0, 1.5, p, 0.0, 0.1), {{70.0, 100.0}, {160.0, 163.5}},
                 0.05);
}

TEST(ComputeAtg, DegenerateInterval) {
  EXPECT_TRUE(compute_atg(70.0, 71.0, 1.5, SignalPlan{}, 0.0).empty());
}

TEST(ComputeAtg, LeaderInRed) {
  const auto got = compute_atg(30.0, 95.0, 1.5, SignalPlan{}, 0.0);
  expect_windows(got, {{60.0, 93.5}});
  expect_windows(atg_brute_force(30.0, 95.0, 1.5, SignalPlan{}, 0.0, 0.1), {{60.0, 93.5}}, 0.05);
}

TEST(ComputeAtg, NoGreenBeforeDeadline) {
  EXPECT_TRUE(compute_atg(10.0, 55.0, 1.5, SignalPlan{}, 0.0).empty());
  EXPECT_TRUE(atg_brute_force(10.0, 55.0, 1.5, SignalPlan{}, 0.0, 0.1).empty());
}

TEST(ComputeAtg, NearlyAllGreenPlan) {
  const SignalPlan p{100.0, 1e-6, 100.0 - 1e-6};
  expect_windows(compute_atg(20.0, 80.0, 2.0, p, 0.0), {{20.0, 78.0}});
}

TEST(ComputeAtg, ShortWindowsDropped) {
  // [160, 160.5] is below the 1 s minimum.
  expect_windows(compute_atg(70.0, 162.0, 1.5, SignalPlan{}, 1.0), {{70.0, 100.0}});
}

TEST(ComputeAtg, RandomAgreementWithGridReference) {
  const auto rep = verify_atg(300, 99);
  EXPECT_TRUE(rep.ok()) << rep.first_mismatch;
}
