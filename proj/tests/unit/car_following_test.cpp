#include <gtest/gtest.h>

#include "buslane/car_following.hpp"
#include "oracles.hpp"

using namespace buslane;

TEST(FollowModel, ByClassAndLeader) {
  EXPECT_EQ(follow_model(VehicleClass::HDV, VehicleClass::CAV), FollowModel::Krauss);
  EXPECT_EQ(follow_model(VehicleClass::CHV, std::nullopt), FollowModel::Krauss);
  EXPECT_EQ(follow_model(VehicleClass::CAV, VehicleClass::Bus), FollowModel::CACC);
  EXPECT_EQ(follow_model(VehicleClass::CAV, std::nullopt), FollowModel::CACC);
  EXPECT_EQ(follow_model(VehicleClass::Bus, VehicleClass::HDV), FollowModel::ACC);
}

TEST(FollowerSpeed, FreeRoadAcceleratesToLimit) {
  const VehiclePopulation pop;
  for (FollowModel m : {FollowModel::Krauss, FollowModel::ACC, FollowModel::CACC}) {
    const FollowParams p = follow_params(VehicleClass::CAV, m, pop, 13.89);
    EXPECT_DOUBLE_EQ(follower_speed(m, 5.0, std::nullopt, p, 0.5), 5.0 + p.accel * 0.5);
    EXPECT_DOUBLE_EQ(follower_speed(m, 13.89, std::nullopt, p, 0.5), 13.89);
  }
}

TEST(FollowerSpeed, KraussBehindStoppedLeader) {
  const VehiclePopulation pop;
  const FollowParams p = follow_params(VehicleClass::HDV, FollowModel::Krauss, pop, 13.89);
  const double next = follower_speed(FollowModel::Krauss, 13.89, Leader{10.0, 0.0, 0.0, 5.0}, p, 0.5);
  EXPECT_LE(next, oracle::stopping_speed(10.0 - p.min_gap, p.decel));
  EXPECT_GE(next, 0.0);
}

TEST(FollowerSpeed, KraussSafeSpeedClosedForm) {
  // v_l + (g - v_l tau) / ((v + v_l) / (2b) + tau)
  const double g = 20.0, v = 12.0, vl = 8.0, b = 4.0, tau = 1.5;
  EXPECT_NEAR(krauss_safe_speed(g, v, vl, b, tau), vl + (g - vl * tau) / ((v + vl) / (2 * b) + tau),
              1e-12);
  EXPECT_DOUBLE_EQ(krauss_safe_speed(0.0, 10.0, 0.0, b, tau), 0.0);
}

TEST(FollowerSpeed, DawdleOnlySlowsAcceleration) {
  const VehiclePopulation pop;
  const FollowParams p = follow_params(VehicleClass::HDV, FollowModel::Krauss, pop, 13.89);
  const double cruising = follower_speed(FollowModel::Krauss, 13.89, std::nullopt, p, 0.5, 0.9);
  EXPECT_DOUBLE_EQ(cruising, 13.89);
  const double speeding_up = follower_speed(FollowModel::Krauss, 5.0, std::nullopt, p, 0.5, 0.9);
  EXPECT_LT(speeding_up, 5.0 + p.accel * 0.5);
  EXPECT_GE(speeding_up, 5.0);
}

TEST(FollowerSpeed, CaccHoldsEquilibriumSpacing) {
  const VehiclePopulation pop;
  const FollowParams p = follow_params(VehicleClass::CAV, FollowModel::CACC, pop, 13.89);
  const double v = 12.0;
  const double gap = p.tau * v - pop.car_len;  // front-to-front spacing tau * v
  ASSERT_GT(gap, p.min_gap);
  EXPECT_NEAR(follower_speed(FollowModel::CACC, v, Leader{gap, v, 0.0, pop.car_len}, p, 0.5), v,
              1e-12);
}

TEST(FollowerSpeed, CaccConvergesBehindSteadyLeader) {
  const VehiclePopulation pop;
  const FollowParams p = follow_params(VehicleClass::CAV, FollowModel::CACC, pop, 13.89);
  const double dt = 0.5, vl = 10.0;
  double gap = 40.0, v = 13.89;
  for (int i = 0; i < 600; ++i) {
    const double next = follower_speed(FollowModel::CACC, v, Leader{gap, vl, 0.0, pop.car_len}, p, dt);
    gap += (vl - 0.5 * (v + next)) * dt;
    v = next;
    ASSERT_GT(gap, 0.0);
  }
  EXPECT_NEAR(v, vl, 1e-3);
  EXPECT_NEAR(gap + pop.car_len, std::max(p.min_gap + pop.car_len, p.tau * vl), 0.05);
}

TEST(FollowerSpeed, AutomatedStopsBehindStandingQueue) {
  const VehiclePopulation pop;
  for (FollowModel m : {FollowModel::ACC, FollowModel::CACC}) {
    const FollowParams p = follow_params(VehicleClass::CAV, m, pop, 13.89);
    double gap = 80.0, v = 13.89;
    for (int i = 0; i < 200; ++i) {
      const double next = follower_speed(m, v, Leader{gap, 0.0, 0.0, pop.car_len}, p, 0.5);
      gap -= 0.5 * (v + next) * 0.5;
      v = next;
      ASSERT_GT(gap, 0.5);
    }
    EXPECT_NEAR(v, 0.0, 1e-6);
  }
}
