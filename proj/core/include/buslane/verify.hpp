#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "buslane/gaps.hpp"
#include "buslane/row_opt.hpp"

namespace buslane {

struct AtgCase {
  double leader_td = 0.0;
  double follower_td = 0.0;
  double tau = 0.0;
  double min_window = 0.0;
  SignalPlan signal;
};

/// Random signal plan, departure pair and headway.
AtgCase random_atg_case(std::mt19937_64& rng);

/// K candidates beside one bus-lane gap, with anchors and green windows drawn
/// so that both feasible and infeasible assignments are common.
RowInstance random_row_instance(std::mt19937_64& rng, std::size_t k);

struct VerifyReport {
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  double seconds = 0.0;      // time spent in the solver under test only
  double max_seconds = 0.0;  // slowest single case
  std::string first_mismatch;

  bool ok() const { return mismatches == 0; }
};

/// compute_atg against the 0.1 s grid reference: same window count, endpoints
/// within `tolerance`.
VerifyReport verify_atg(std::size_t cases, std::uint64_t seed, double tolerance = 0.05);

/// solve_bnb against solve_exhaustive, K drawn from [k_min, k_max].
VerifyReport verify_row_opt(std::size_t cases, std::uint64_t seed, std::size_t k_min,
                            std::size_t k_max);

/// solve_bnb alone on instances of size k; reports timings.
VerifyReport time_bnb(std::size_t cases, std::uint64_t seed, std::size_t k);

}  // namespace buslane
