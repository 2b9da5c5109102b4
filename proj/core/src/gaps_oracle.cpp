#include <cmath>

#include "buslane/gaps.hpp"

namespace buslane {
namespace {

bool in_green(double t, double cycle, double red) {
  return t - std::floor(t / cycle) * cycle >= red;
}

// Boundary between a sample with state `at_lo` and one without, located by
// bisection on the green test alone.
double refine(double lo, double hi, double cycle, double red) {
  const bool at_lo = in_green(lo, cycle, red);
  for (int i = 0; i < 60 && hi - lo > 1e-9; ++i) {
    const double mid = 0.5 * (lo + hi);
    (in_green(mid, cycle, red) == at_lo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TemporalGap atg_brute_force(double leader_td, double follower_td, double tau,
                            const SignalPlan& signal, double min_window, double grid) {
  TemporalGap out;
  out.leader_td = leader_td;
  out.follower_td = follower_td;
  const double end = follower_td - tau;
  if (!(end > leader_td)) return out;

  std::vector<double> samples;
  const auto steps = static_cast<long>(std::floor((end - leader_td) / grid));
  samples.reserve(static_cast<std::size_t>(steps) + 2);
  for (long i = 0; i <= steps; ++i) samples.push_back(leader_td + static_cast<double>(i) * grid);
  if (samples.back() < end) samples.push_back(end);

  const double c = signal.cycle, r = signal.red;
  std::size_t i = 0;
  while (i < samples.size()) {
    if (!in_green(samples[i], c, r)) {
      ++i;
      continue;
    }
    const std::size_t first = i;
    while (i + 1 < samples.size() && in_green(samples[i + 1], c, r)) ++i;
    const std::size_t last = i;
    const double start = first == 0 ? samples[0] : refine(samples[first - 1], samples[first], c, r);
    const double stop =
        last + 1 == samples.size() ? samples[last] : refine(samples[last], samples[last + 1], c, r);
    if (stop - start >= min_window) out.windows.push_back({start, stop});
    ++i;
  }
  return out;
}

}  // namespace buslane
