#include <gtest/gtest.h>

#include "buslane/protocol.hpp"
#include "oracles.hpp"

using namespace buslane;

namespace {

SpatialGap gap_between(double rear, double front) {
  SpatialGap g;
  g.leader_id = 100;
  g.follower_id = 101;
  g.leader_pos = front;
  g.front_pos = front - 5.0;
  g.follower_pos = rear;
  g.rear_pos = rear;
  return g;
}

VehicleState right_turner(int id, VehicleClass cls, double pos) {
  return oracle::vehicle(id, cls, pos, 13.89, Movement::RightTurn, 1);
}

}  // namespace

TEST(RightTurnGapRule, ConnectedCarInsideGap) {
  const std::vector<SpatialGap> gaps = {gap_between(300.0, 500.0)};
  const std::vector<VehicleState> lane = {right_turner(7, VehicleClass::CHV, 420.0)};
  const auto out = right_turn_gap_advisories(gaps, lane, 2, 10.0, 5.0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].vehicle_id, 7);
  EXPECT_EQ(out[0].target_lane, 2);
  EXPECT_EQ(out[0].kind, AdvisoryKind::RightTurnGap);
  EXPECT_DOUBLE_EQ(out[0].expires_at, 15.0);
}

TEST(RightTurnGapRule, ThroughCarIgnored) {
  const std::vector<SpatialGap> gaps = {gap_between(300.0, 500.0)};
  const std::vector<VehicleState> lane = {oracle::vehicle(7, VehicleClass::CHV, 420.0)};
  EXPECT_TRUE(right_turn_gap_advisories(gaps, lane, 2, 10.0, 5.0).empty());
}

TEST(RightTurnGapRule, HumanDriverLeftToRuleThree) {
  const std::vector<SpatialGap> gaps = {gap_between(300.0, 500.0)};
  const std::vector<VehicleState> lane = {right_turner(7, VehicleClass::HDV, 420.0)};
  EXPECT_TRUE(right_turn_gap_advisories(gaps, lane, 2, 10.0, 5.0).empty());
}

TEST(RightTurnFallbackRule, PastThreshold) {
  const Scenario s;
  const std::vector<VehicleState> lane = {right_turner(3, VehicleClass::CAV, 600.0)};
  const auto out = right_turn_fallback_advisories(lane, s.road, 0.0, 5.0, {});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].kind, AdvisoryKind::RightTurnFallback);
}

TEST(RightTurnFallbackRule, NoDuplicate) {
  const Scenario s;
  const std::vector<VehicleState> lane = {right_turner(3, VehicleClass::CAV, 600.0)};
  EXPECT_TRUE(right_turn_fallback_advisories(lane, s.road, 0.0, 5.0, {3}).empty());
}

TEST(RightTurnFallbackRule, BeforeThreshold) {
  const Scenario s;
  const std::vector<VehicleState> lane = {right_turner(3, VehicleClass::CAV, 500.0)};
  EXPECT_TRUE(right_turn_fallback_advisories(lane, s.road, 0.0, 5.0, {}).empty());
}

TEST(NonconnectedRightTurn, WaitsForBusStop) {
  const Scenario s = oracle::stop_scenario();
  EXPECT_EQ(nonconnected_right_turn_policy(right_turner(1, VehicleClass::HDV, 350.0), s.road),
            RightTurnDirective::Hold);
  EXPECT_EQ(nonconnected_right_turn_policy(right_turner(1, VehicleClass::HDV, 410.0), s.road),
            RightTurnDirective::EnterBusLane);
}

TEST(NonconnectedRightTurn, EntersAtEntryWithoutStop) {
  const Scenario s;
  EXPECT_EQ(nonconnected_right_turn_policy(right_turner(1, VehicleClass::HDV, 5.0), s.road),
            RightTurnDirective::EnterBusLane);
}

TEST(NonconnectedRightTurn, ConnectedNotHandled) {
  const Scenario s;
  EXPECT_EQ(nonconnected_right_turn_policy(right_turner(1, VehicleClass::CHV, 5.0), s.road),
            RightTurnDirective::NotApplicable);
}

TEST(ThroughCandidates, BlockedByRightTurnAhead) {
  const Scenario s;
  const SpatialGap g = gap_between(300.0, 500.0);
  const TemporalGap w{{{60.0, 100.0}}, 60.0, 120.0};
  std::vector<VehicleState> lane = {right_turner(1, VehicleClass::CAV, 600.0),
                                    oracle::vehicle(2, VehicleClass::CAV, 400.0)};
  oracle::order_lane(lane);
  const std::vector<DepartureEstimate> est = {{2, 70.0, 70.0, 70.0, 0.0}};
  EXPECT_FALSE(through_candidates(g, w, lane, est, s.road).has_value());
}

TEST(ThroughCandidates, MembershipByWindow) {
  const Scenario s;
  const SpatialGap g = gap_between(300.0, 500.0);
  const TemporalGap w{{{60.0, 100.0}}, 60.0, 120.0};
  std::vector<VehicleState> lane = {oracle::vehicle(1, VehicleClass::CAV, 480.0),
                                    oracle::vehicle(2, VehicleClass::CHV, 420.0),
                                    oracle::vehicle(3, VehicleClass::CAV, 350.0)};
  oracle::order_lane(lane);
  const std::vector<DepartureEstimate> est = {
      {1, 75.0, 75.0, 75.0, 0.0}, {2, 55.0, 55.0, 62.0, 0.0}, {3, 90.0, 90.0, 90.0, 0.0}};
  const auto set = through_candidates(g, w, lane, est, s.road);
  ASSERT_TRUE(set.has_value());
  EXPECT_EQ(set->members, (std::vector<int>{1, 3}));
}

TEST(ThroughCandidates, EmptyWindow) {
  const Scenario s;
  std::vector<VehicleState> lane = {oracle::vehicle(1, VehicleClass::CAV, 480.0)};
  const std::vector<DepartureEstimate> est = {{1, 75.0, 75.0, 75.0, 0.0}};
  EXPECT_FALSE(through_candidates(gap_between(300.0, 500.0), TemporalGap{}, lane, est, s.road));
}

TEST(ThroughCandidates, HumanDriverNeverCandidate) {
  const Scenario s;
  const TemporalGap w{{{60.0, 100.0}}, 60.0, 120.0};
  std::vector<VehicleState> lane = {oracle::vehicle(1, VehicleClass::HDV, 480.0)};
  const std::vector<DepartureEstimate> est = {{1, 75.0, 75.0, 75.0, 0.0}};
  EXPECT_FALSE(through_candidates(gap_between(300.0, 500.0), w, lane, est, s.road));
}
