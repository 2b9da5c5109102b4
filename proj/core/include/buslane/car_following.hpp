#pragma once

#include <optional>

#include "buslane/scenario.hpp"
#include "buslane/types.hpp"

namespace buslane {

enum class FollowModel { Krauss, ACC, CACC };

/// What the follower sees ahead in its lane. `gap` is bumper to bumper.
struct Leader {
  double gap = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double length = 0.0;  // zero for fixed obstacles (stop bar, stop line)
};

struct FollowParams {
  double accel = 3.0;
  double decel = 4.0;
  double tau = 1.5;      // Krauss reaction time, or ACC/CACC time headway
  double min_gap = 2.5;  // standstill gap
  double v_max = 13.89;
  double sigma = 0.0;    // Krauss imperfection
};

/// HDV/CHV drive Krauss; CAVs and buses run CACC behind automated leaders and
/// fall back to ACC behind human-driven ones.
FollowModel follow_model(VehicleClass self, std::optional<VehicleClass> leader);

FollowParams follow_params(VehicleClass self, FollowModel model, const VehiclePopulation& pop,
                           double v_max);

/// Krauss safe speed for net gap `gap` (standstill gap already removed).
double krauss_safe_speed(double gap, double v, double v_leader, double decel, double tau);

/// Speed after one step of length dt. `dawdle` in [0, 1) scales the Krauss
/// imperfection draw; it only slows vehicles that are speeding up.
double follower_speed(FollowModel model, double v, const std::optional<Leader>& leader,
                      const FollowParams& p, double dt, double dawdle = 0.0);

}  // namespace buslane
