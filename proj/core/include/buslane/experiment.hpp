#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "buslane/metrics.hpp"
#include "buslane/scenario.hpp"
#include "buslane/strategies.hpp"

namespace buslane {

struct RunOutputs {
  std::ostream* trajectory = nullptr;  // header written here
  std::ostream* trips = nullptr;
};

/// Stop-bar throughput (veh/h) of the general lanes under EBL with no buses,
/// no right turns and a saturated entry, counted after warmup.
double calibrate_capacity(const Scenario& s);

/// Returns `s` with capacity_vph filled in, calibrating when absent. Results
/// are cached per fingerprint for the life of the process.
Scenario ensure_capacity(Scenario s);

/// One seeded run. InvariantBreach propagates to the caller.
RunResult run_single(const Scenario& s, StrategyKind strategy, std::uint64_t seed,
                     const RunOutputs& outputs = {});

/// Demand overrides for one matrix cell.
struct CellSpec {
  std::string label;
  std::optional<double> vc_ratio;
  std::optional<double> cpr;
  std::optional<double> bus_headway_mean;
  std::optional<double> right_turn_ratio;
  std::optional<std::optional<double>> bus_stop_pos;  // inner empty: no stop
  std::optional<double> sim_duration;

  Scenario apply(const Scenario& base) const;
};

struct MatrixConfig {
  Scenario base;
  std::vector<StrategyKind> strategies;
  std::vector<std::uint64_t> seeds;
  std::vector<CellSpec> cells;
};

/// JSON: {"scenario": path-or-object, "strategies": [...], "seeds": [...],
/// "cells": [...], "grid": {factor: [levels]}}. Grid cells follow listed cells.
MatrixConfig parse_matrix_config(const std::string& json_text,
                                 const std::filesystem::path& base_dir);
MatrixConfig load_matrix_config(const std::filesystem::path& path);

struct MatrixRun {
  std::size_t cell = 0;
  StrategyKind strategy = StrategyKind::EBL;
  std::uint64_t seed = 0;
  RunResult result;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Every (cell, strategy, seed); a failed run is recorded and the rest go on.
/// Output order is fixed regardless of `jobs`.
std::vector<MatrixRun> run_matrix(const MatrixConfig& config, unsigned jobs,
                                  const ProgressFn& progress = {});

struct Aggregate {
  std::size_t cell = 0;
  StrategyKind strategy = StrategyKind::EBL;
  std::string metric;
  std::size_t n = 0;
  double mean = 0.0;
  double ci95 = 0.0;  // half-width, Student t
};

std::vector<Aggregate> aggregate(const MatrixConfig& config, std::span<const MatrixRun> runs);
const Aggregate* find_aggregate(std::span<const Aggregate> table, std::size_t cell,
                                StrategyKind strategy, std::string_view metric);

void write_runs_csv(std::ostream& out, const MatrixConfig& config,
                    std::span<const MatrixRun> runs);
void write_aggregate_csv(std::ostream& out, const MatrixConfig& config,
                         std::span<const Aggregate> table);

}  // namespace buslane
