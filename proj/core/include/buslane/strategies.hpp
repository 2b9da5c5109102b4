#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "buslane/microsim.hpp"
#include "buslane/row_opt.hpp"

namespace buslane {

enum class StrategyKind { EBL, BLIDP, DSTP };

std::string_view to_string(StrategyKind k);
std::optional<StrategyKind> parse_strategy(std::string_view s);

struct ControllerConfig {
  StrategyKind kind = StrategyKind::DSTP;
  double clearance_dist = 300.0;      // BLIDP
  double urgent_within = 100.0;       // BLIDP: bus this close escalates exit advisories
  double control_interval = 5.0;      // DSTP h
  double estimation_horizon = 200.0;  // DSTP: follower time of the entry-side gap

  static ControllerConfig defaults(StrategyKind kind, const Scenario& s);
};

void validate(const ControllerConfig& c, const Scenario& s);

/// One optimizer decision kept for the bus-protection audit.
struct AuditRecord {
  double time = 0.0;
  int vehicle_id = 0;
  std::optional<int> follower_id;  // empty: entry-side horizon
  double t_bus = 0.0;
  double follower_td = 0.0;
  double tau = 0.0;

  bool ok() const { return t_bus <= follower_td - tau + 1e-9; }
};

/// The slice of the world DSTP looks at on one tick.
struct DstpSnapshot {
  double now = 0.0;
  bool optimizer_tick = false;
  std::vector<VehicleState> bus_lane;       // front to back
  std::vector<VehicleState> adjacent_lane;  // front to back
  double bus_lane_detection = kNegInf;
  double adjacent_detection = kNegInf;
  std::unordered_set<int> already_advised;  // live right-turn advisories
};

struct DstpDecision {
  std::vector<Advisory> advisories;
  std::vector<RowInstance> instances;
  std::vector<RowSolution> solutions;
  std::vector<AuditRecord> audit;
};

/// Rules 1-3 every tick; gap-by-gap optimization (front-most first) on
/// optimizer ticks. Upstream gaps see downstream decisions as committed.
DstpDecision dstp_decide(const DstpSnapshot& snap, const Scenario& scenario,
                         const ControllerConfig& config);

/// Right-turn vehicles ride the bus lane into the pocket from l_c - l_r on;
/// through traffic never enters.
class EblController : public Controller {
 public:
  explicit EblController(const Scenario& s) : scenario_(s) {}
  std::string_view name() const override { return "ebl"; }
  std::vector<Advisory> on_tick(const Simulation& sim) override;

 private:
  Scenario scenario_;
};

class BlidpController : public Controller {
 public:
  BlidpController(const Scenario& s, ControllerConfig c) : scenario_(s), config_(c) {}
  std::string_view name() const override { return "blidp"; }
  std::vector<Advisory> on_tick(const Simulation& sim) override;
  bool permits_bus_lane_entry(const Simulation& sim, const SimVehicle& v) const override;

  /// Whether `pos` lies in [bus, bus + clearance] for any bus on the bus lane.
  bool in_clearance(const Simulation& sim, double pos) const;

 private:
  Scenario scenario_;
  ControllerConfig config_;
};

class DstpController : public Controller {
 public:
  DstpController(const Scenario& s, ControllerConfig c) : scenario_(s), config_(c) {}
  std::string_view name() const override { return "dstp"; }
  std::vector<Advisory> on_tick(const Simulation& sim) override;

  const std::vector<AuditRecord>& audit() const { return audit_; }
  std::uint64_t optimizer_calls() const { return optimizer_calls_; }

 private:
  Scenario scenario_;
  ControllerConfig config_;
  std::vector<AuditRecord> audit_;
  std::uint64_t optimizer_calls_ = 0;
};

std::unique_ptr<Controller> make_controller(const ControllerConfig& config, const Scenario& s);

}  // namespace buslane
