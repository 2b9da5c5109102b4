#include "buslane/car_following.hpp"

#include <algorithm>
#include <cmath>

namespace buslane {

namespace {

// Constant-time-gap controller gains.
constexpr double kGapGain = 0.45;
constexpr double kSpeedGain = 0.6;
constexpr double kFeedForward = 0.5;  // CACC only

}  // namespace

FollowModel follow_model(VehicleClass self, std::optional<VehicleClass> leader) {
  if (!is_automated(self)) return FollowModel::Krauss;
  if (leader && !is_automated(*leader)) return FollowModel::ACC;
  return FollowModel::CACC;
}

FollowParams follow_params(VehicleClass self, FollowModel model, const VehiclePopulation& pop,
                           double v_max) {
  FollowParams p;
  p.v_max = v_max;
  const bool bus = self == VehicleClass::Bus;
  p.accel = bus ? pop.bus_accel : pop.car_accel;
  p.decel = bus ? pop.bus_decel : pop.car_decel;
  switch (model) {
    case FollowModel::Krauss:
      p.tau = pop.tau_h;
      p.min_gap = pop.min_gap_human;
      p.sigma = pop.krauss_sigma;
      break;
    case FollowModel::ACC:
      p.tau = pop.tau_a;
      p.min_gap = pop.min_gap_automated;
      break;
    case FollowModel::CACC:
      p.tau = pop.tau_c;
      p.min_gap = pop.min_gap_automated;
      break;
  }
  return p;
}

double krauss_safe_speed(double gap, double v, double v_leader, double decel, double tau) {
  const double v_safe = v_leader + (gap - v_leader * tau) / ((v + v_leader) / (2.0 * decel) + tau);
  return std::max(0.0, v_safe);
}

double follower_speed(FollowModel model, double v, const std::optional<Leader>& leader,
                      const FollowParams& p, double dt, double dawdle) {
  const double v_free = std::min(v + p.accel * dt, p.v_max);

  if (model == FollowModel::Krauss) {
    double v_des = v_free;
    if (leader) {
      v_des = std::min(
          v_des, krauss_safe_speed(leader->gap - p.min_gap, v, leader->speed, p.decel, p.tau));
    }
    if (v_des > v && p.sigma > 0.0) {
      v_des = std::max(v, v_des - p.sigma * p.accel * dt * dawdle);
    }
    return std::max(0.0, v_des);
  }

  if (!leader) return v_free;

  // Time headway is front to front: spacing tau * v, never below the standstill gap.
  const double target_gap = std::max(p.min_gap, p.tau * v - leader->length);
  double a = kGapGain * (leader->gap - target_gap) + kSpeedGain * (leader->speed - v);
  if (model == FollowModel::CACC) a += kFeedForward * leader->accel;
  a = std::clamp(a, -p.decel, p.accel);

  // Kinematic braking needed to close the speed difference before the standstill gap.
  if (v > leader->speed) {
    const double room = std::max(leader->gap - p.min_gap, 0.1);
    const double closing = v - leader->speed;
    const double needed = closing * closing / (2.0 * room);
    if (needed > 0.5 * p.decel) a = std::min(a, -needed);
  }
  return std::clamp(v + a * dt, 0.0, p.v_max);
}

}  // namespace buslane
