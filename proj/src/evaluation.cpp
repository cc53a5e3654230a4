#include "sril/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sril {

std::vector<EpisodeReport> evaluate_episodes(const PolicyOracle& policy,
                                             const ActionStats& stats, const EvalConfig& cfg,
                                             ParallelMode mode) {
  std::vector<EpisodeReport> reports(static_cast<std::size_t>(std::max(cfg.episodes, 0)));
  const auto one = [&](int i) {
    SimEnv env(cfg.task, cfg.params);
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(i);
    reports[static_cast<std::size_t>(i)] =
        cfg.offload ? run_episode(policy, stats, env, cfg.offload_cfg, cfg.latency, seed,
                                  cfg.episode_options)
                    : run_episode_baseline(policy, env, cfg.latency, seed, cfg.offload_cfg.m,
                                           cfg.episode_options);
  };
  if (mode == ParallelMode::OpenMp) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < cfg.episodes; ++i) one(i);
  } else {
    for (int i = 0; i < cfg.episodes; ++i) one(i);
  }
  return reports;
}

Aggregate aggregate(const std::vector<EpisodeReport>& reports) {
  Aggregate agg;
  agg.episodes = static_cast<int>(reports.size());
  if (reports.empty()) return agg;
  double cost_sum = 0.0;
  int successes = 0;
  for (const EpisodeReport& r : reports) {
    if (r.success) {
      ++successes;
      cost_sum += r.cost_time_ms;
    }
    agg.mean_inference += static_cast<double>(r.inference_count);
    agg.mean_steps += static_cast<double>(r.step_count);
    agg.mean_skip_fraction += r.step_count > 0 ? static_cast<double>(r.skip_count) /
                                                     static_cast<double>(r.step_count)
                                               : 0.0;
  }
  const double n = static_cast<double>(reports.size());
  agg.success_rate = static_cast<double>(successes) / n;
  agg.mean_cost_ms = successes > 0 ? cost_sum / static_cast<double>(successes)
                                   : std::numeric_limits<double>::quiet_NaN();
  agg.mean_inference /= n;
  agg.mean_steps /= n;
  agg.mean_skip_fraction /= n;
  return agg;
}

std::vector<SweepCell> sweep_offload(const PolicyOracle& policy, const ActionStats& stats,
                                     const EvalConfig& base, const std::vector<double>& cot_grid,
                                     const std::vector<int>& mcod_grid, ParallelMode mode,
                                     std::vector<std::vector<EpisodeReport>>* cell_reports) {
  if (cot_grid.empty() || mcod_grid.empty())
    throw std::runtime_error("sweep: empty parameter grid");
  std::vector<int> mcods = mcod_grid;
  std::sort(mcods.begin(), mcods.end());
  std::vector<double> cots = cot_grid;
  std::sort(cots.begin(), cots.end());

  std::vector<SweepCell> cells;
  if (cell_reports != nullptr) cell_reports->clear();
  for (int mcod : mcods) {
    for (double cot : cots) {
      EvalConfig cfg = base;
      cfg.offload = true;
      cfg.offload_cfg.cot = cot;
      cfg.offload_cfg.mcod = mcod;
      const auto reports = evaluate_episodes(policy, stats, cfg, mode);
      SweepCell cell;
      cell.cot = cot;
      cell.mcod = mcod;
      cell.agg = aggregate(reports);
      cells.push_back(cell);
      if (cell_reports != nullptr) cell_reports->push_back(reports);
    }
  }
  return cells;
}

std::vector<double> default_cot_grid() {
  // 8 log-spaced thresholds from tight to fully permissive.
  std::vector<double> grid;
  double v = 0.01;
  for (int i = 0; i < 8; ++i) {
    grid.push_back(v);
    v *= std::pow(10.0, 0.5);
  }
  return grid;
}

std::vector<int> default_mcod_grid(int K) {
  std::vector<int> grid = {1, 5, 10};
  if (K > 10) grid.push_back(K);
  return grid;
}

}  // namespace sril
