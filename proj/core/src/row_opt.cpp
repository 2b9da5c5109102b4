#include "buslane/row_opt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "buslane/estimator.hpp"

namespace buslane {

double HeadwayTable::tau(VehicleClass self, VehicleClass leader) const {
  if (!is_automated(self)) return human;
  return is_automated(leader) ? automated_pair : automated_behind_human;
}

HeadwayTable HeadwayTable::from(const VehiclePopulation& pop) {
  return {desired_headway(VehicleClass::CAV, VehicleClass::CAV, pop),
          desired_headway(VehicleClass::CAV, VehicleClass::HDV, pop),
          desired_headway(VehicleClass::HDV, VehicleClass::HDV, pop)};
}

std::size_t RowSolution::lane_changes() const {
  return static_cast<std::size_t>(std::count(x.begin(), x.end(), std::uint8_t{1}));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Nearest preceding real vehicle on one lane.
struct Chain {
  bool has = false;
  double td = 0.0;
  VehicleClass cls = VehicleClass::HDV;

  static Chain from(const LaneAnchor& a) { return {a.present, a.t_depart, a.cls}; }
};

double real_departure(const RowInstance& inst, const Chain& prev, VehicleClass cls,
                      double t_free) {
  const double reference = prev.has ? prev.td : kNegInf;
  const double tau = prev.has ? inst.headways.tau(cls, prev.cls) : 0.0;
  return signalized_departure(unsignalized_departure(reference, tau, t_free), inst.signal,
                              inst.lost_time, false);
}

bool inside_windows(const RowInstance& inst, double t) {
  for (const auto& w : inst.windows) {
    if (w.contains(t)) return true;
  }
  return false;
}

bool lateral_ok(double gap, double v_other, double v_self, const RowInstance& inst) {
  const double need = inst.lateral_safe_gap +
                      std::abs(v_other * v_other - v_self * v_self) /
                          (2.0 * inst.lateral_comfort_decel);
  return need <= gap;
}

// Per-candidate contribution for one decision; advances both chains.
struct Step {
  double t_general;
  double t_bus;
  double cost;
};

Step advance(const RowInstance& inst, std::size_t k, bool enter, Chain& general, Chain& bus) {
  const RowCandidate& c = inst.candidates[k];
  Step s{};
  if (enter) {
    s.t_general = general.has ? general.td : kNaN;
    s.t_bus = real_departure(inst, bus, c.cls, c.t_free_bus);
    bus = {true, s.t_bus, c.cls};
    s.cost = s.t_bus;
  } else {
    s.t_general = real_departure(inst, general, c.cls, c.t_free_general);
    s.t_bus = bus.has ? bus.td : kNaN;
    general = {true, s.t_general, c.cls};
    s.cost = s.t_general;
  }
  return s;
}

void require_binary(std::span<const std::uint8_t> x, std::size_t k) {
  if (x.size() != k) throw std::invalid_argument("assignment length differs from candidate count");
  for (auto v : x) {
    if (v > 1) throw std::invalid_argument("assignment entries must be 0 or 1");
  }
}

bool better(double obj, std::size_t changes, double best_obj, std::size_t best_changes) {
  return obj < best_obj || (obj == best_obj && changes < best_changes);
}

}  // namespace

bool static_feasible(const RowInstance& inst, std::size_t k) {
  const RowCandidate& c = inst.candidates.at(k);
  if (!(c.speed > 0.0)) return false;
  if (c.pos > inst.no_change_boundary) return false;
  if (inst.bus_leader.present && inst.bus_leader.spatial) {
    const double gap = inst.bus_leader.pos - c.pos - inst.bus_leader.length;
    if (!lateral_ok(gap, inst.bus_leader.speed, c.speed, inst)) return false;
  }
  if (inst.bus_follower.present && inst.bus_follower.spatial) {
    const double gap = c.pos - inst.bus_follower.pos - c.length;
    if (!lateral_ok(gap, inst.bus_follower.speed, c.speed, inst)) return false;
  }
  return true;
}

Evaluation evaluate_assignment(const RowInstance& inst, std::span<const std::uint8_t> x) {
  const std::size_t n = inst.size();
  require_binary(x, n);
  Evaluation e;
  e.t_general.resize(n);
  e.t_bus.resize(n);
  Chain general = Chain::from(inst.general_leader);
  Chain bus = Chain::from(inst.bus_leader);
  for (std::size_t k = 0; k < n; ++k) {
    const bool enter = x[k] == 1;
    const Step s = advance(inst, k, enter, general, bus);
    e.t_general[k] = s.t_general;
    e.t_bus[k] = s.t_bus;
    e.objective += s.cost;
    if (enter && e.feasible()) {
      if (!static_feasible(inst, k)) {
        e.violation = Violation::Static;
        e.violated_index = k;
      } else if (!inside_windows(inst, s.t_bus)) {
        e.violation = Violation::Window;
        e.violated_index = k;
      }
    }
  }
  return e;
}

RowSolution solve_exhaustive(const RowInstance& inst) {
  const std::size_t n = inst.size();
  if (n > 20) throw std::invalid_argument("solve_exhaustive supports at most 20 candidates");

  std::uint64_t forced_zero = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!static_feasible(inst, k)) forced_zero |= std::uint64_t{1} << (n - 1 - k);
  }

  RowSolution best;
  best.objective = kPosInf;
  std::size_t best_changes = 0;
  std::vector<std::uint8_t> x(n);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    if (mask & forced_zero) continue;
    for (std::size_t k = 0; k < n; ++k) x[k] = (mask >> (n - 1 - k)) & 1U;
    ++best.nodes;
    const Evaluation e = evaluate_assignment(inst, x);
    if (!e.feasible()) continue;
    const auto changes = static_cast<std::size_t>(std::popcount(mask));
    if (best.x.empty() || better(e.objective, changes, best.objective, best_changes)) {
      best.x = x;
      best.t_general = e.t_general;
      best.t_bus = e.t_bus;
      best.objective = e.objective;
      best_changes = changes;
    }
  }
  best.status = best.x.size() == n && best.objective < kPosInf ? SolveStatus::Optimal
                                                               : SolveStatus::AllInfeasible;
  return best;
}

namespace {

class BranchAndBound {
 public:
  explicit BranchAndBound(const RowInstance& inst)
      : inst_(inst), n_(inst.size()), x_(n_), allowed_(n_), suffix_bound_(n_ + 1, 0.0) {
    for (std::size_t k = 0; k < n_; ++k) allowed_[k] = static_feasible(inst, k);
    // Any real departure is at least the signalized free-flow time on either lane.
    for (std::size_t k = n_; k-- > 0;) {
      const auto& c = inst.candidates[k];
      const double lb = std::min(
          signalized_departure(c.t_free_general, inst.signal, inst.lost_time, false),
          signalized_departure(c.t_free_bus, inst.signal, inst.lost_time, false));
      suffix_bound_[k] = suffix_bound_[k + 1] + lb;
    }
  }

  RowSolution run() {
    search(0, 0.0, 0, Chain::from(inst_.general_leader), Chain::from(inst_.bus_leader));
    RowSolution out;
    out.nodes = nodes_;
    if (best_x_.size() != n_) {
      out.status = SolveStatus::AllInfeasible;
      out.objective = kPosInf;
      return out;
    }
    const Evaluation e = evaluate_assignment(inst_, best_x_);
    out.x = best_x_;
    out.t_general = e.t_general;
    out.t_bus = e.t_bus;
    out.objective = e.objective;
    return out;
  }

 private:
  void search(std::size_t k, double partial, std::size_t changes, Chain general, Chain bus) {
    ++nodes_;
    if (k == n_) {
      if (!found_ || better(partial, changes, best_obj_, best_changes_)) {
        found_ = true;
        best_obj_ = partial;
        best_changes_ = changes;
        best_x_ = x_;
      }
      return;
    }
    if (found_) {
      const double bound = partial + suffix_bound_[k];
      if (bound > best_obj_ + 1e-9 * std::max(1.0, std::abs(best_obj_))) return;
    }

    {
      Chain g = general, b = bus;
      const Step s = advance(inst_, k, false, g, b);
      x_[k] = 0;
      search(k + 1, partial + s.cost, changes, g, b);
    }
    if (allowed_[k]) {
      Chain g = general, b = bus;
      const Step s = advance(inst_, k, true, g, b);
      if (inside_windows(inst_, s.t_bus)) {
        x_[k] = 1;
        search(k + 1, partial + s.cost, changes + 1, g, b);
      }
    }
    x_[k] = 0;
  }

  const RowInstance& inst_;
  std::size_t n_;
  std::vector<std::uint8_t> x_;
  std::vector<bool> allowed_;
  std::vector<double> suffix_bound_;
  bool found_ = false;
  double best_obj_ = kPosInf;
  std::size_t best_changes_ = 0;
  std::vector<std::uint8_t> best_x_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

RowSolution solve_bnb(const RowInstance& inst) { return BranchAndBound(inst).run(); }

}  // namespace buslane
