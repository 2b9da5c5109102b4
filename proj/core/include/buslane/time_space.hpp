#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "buslane/scenario.hpp"
#include "buslane/types.hpp"

namespace buslane {

/// No trajectory rows match the requested lane.
class EmptySelection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrajectoryRow {
  long tick = 0;
  double time = 0.0;
  int vehicle_id = 0;
  VehicleClass cls = VehicleClass::HDV;
  Movement movement = Movement::Through;
  int lane = 0;
  double pos = 0.0;
  double speed = 0.0;
};

/// Reads the simulator's trajectory CSV. The header line must match.
std::vector<TrajectoryRow> read_trajectory(std::istream& in);

struct PlotOptions {
  int lane = 2;
  SignalPlan signal;
  double stop_bar = 700.0;
  std::optional<double> t_from;
  std::optional<double> t_to;
  double width = 1200.0;
  double height = 600.0;
};

/// Time on x, position on y. A vehicle's polyline breaks whenever it leaves
/// the lane, so re-entries show as separate segments.
void render_time_space(std::ostream& out, std::span<const TrajectoryRow> rows,
                       const PlotOptions& opts);

}  // namespace buslane
