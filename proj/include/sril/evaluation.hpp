#pragma once

#include <cstdint>
#include <vector>

#include "sril/executor.hpp"
#include "sril/parallel.hpp"
#include "sril/policy.hpp"
#include "sril/simenv.hpp"

namespace sril {

struct EvalConfig {
  TaskSpec task;
  SimParams params;
  int episodes = 50;
  std::uint64_t base_seed = 0;  // episode i runs with seed base_seed + i
  bool offload = true;          // false = plain chunk-ensemble baseline
  OffloadConfig offload_cfg;
  LatencyModel latency;
  EpisodeOptions episode_options;
};

/// Runs episodes with seeds base_seed .. base_seed+episodes-1, each on
/// its own environment instance. Reports come back in seed order and are
/// identical for both parallel modes.
std::vector<EpisodeReport> evaluate_episodes(const PolicyOracle& policy,
                                             const ActionStats& stats, const EvalConfig& cfg,
                                             ParallelMode mode = ParallelMode::OpenMp);

struct Aggregate {
  int episodes = 0;
  double success_rate = 0.0;
  /// Mean modeled cost over successful episodes only (the paper's
  /// completion-time protocol); NaN when nothing succeeded.
  double mean_cost_ms = 0.0;
  double mean_inference = 0.0;
  double mean_steps = 0.0;
  double mean_skip_fraction = 0.0;
};

Aggregate aggregate(const std::vector<EpisodeReport>& reports);

struct SweepCell {
  double cot = 0.0;
  int mcod = 0;
  Aggregate agg;
};

/// Full factorial over the COT and MCOD grids with paired seeds per
/// cell; rows sorted by (mcod, cot).
std::vector<SweepCell> sweep_offload(const PolicyOracle& policy, const ActionStats& stats,
                                     const EvalConfig& base, const std::vector<double>& cot_grid,
                                     const std::vector<int>& mcod_grid,
                                     ParallelMode mode = ParallelMode::OpenMp,
                                     std::vector<std::vector<EpisodeReport>>* cell_reports =
                                         nullptr);

/// 8 log-spaced COT values spanning tight to fully permissive.
std::vector<double> default_cot_grid();
/// MCOD grid {1, 5, 10, K}.
std::vector<int> default_mcod_grid(int K);

}  // namespace sril
