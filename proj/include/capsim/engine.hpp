#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "capsim/config.hpp"
#include "capsim/metrics.hpp"

namespace capsim {

/// Runs one experiment with the seed in the config. Deterministic: identical
/// config and seed give identical reports (wall time aside).
MetricsReport run_experiment(const ExperimentConfig& cfg);

struct SweepPoint {
  std::string axis_key;
  std::string axis_value;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricsReport report;
};

/// Runs all axis values x seeds, optionally across a thread pool. Failed
/// points carry their error text instead of aborting the sweep. An empty
/// value list degenerates to a single run of the template config.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& axis_key,
                                  const std::vector<std::string>& values, int n_seeds,
                                  int threads);

/// Thread count from CAPSIM_THREADS, defaulting to 1 (sequential).
int thread_count_from_env();

/// One adaptation step: move to the adjacent shorter candidate below cbr_low,
/// to the adjacent longer one above cbr_high, clamped at the list ends.
int adapt_rri(const AdaptiveRriConfig& cfg, int current_rri_ms, double measured_cbr);

} // namespace capsim
