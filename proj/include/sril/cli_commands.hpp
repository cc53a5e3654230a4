#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sril {

/// Subcommand implementations behind the sril CLI. Each writes its
/// outputs deterministically (re-running an invocation reproduces every
/// file byte for byte) and embeds the effective configuration in a
/// '# config' line for provenance. Errors are reported by throwing;
/// the CLI main turns them into a diagnostic line and a nonzero exit.

struct GenDemosOptions {
  std::string task = "cube_transfer";
  int n = 50;
  std::uint64_t seed = 0;
  double fs_hz = 50.0;
  std::string out;
  std::string env_config;  // optional key=value overrides
};
void cmd_gen_demos(const GenDemosOptions& opts);

struct DownsampleOptions {
  std::string in;
  std::string out;
  double fm_hz = 10.0;
  int filter_order = 2;
  double cutoff_hz = 0.5;
  bool zero_phase = true;
  std::string normalization = "min_max";        // or z_score
  std::string aggregation = "per_trajectory";   // or aligned_mean
  /// "manipulator" (default), "uniform", or a comma-separated list.
  std::string weights = "manipulator";
  std::string report;  // optional compression report file
};
void cmd_downsample(const DownsampleOptions& opts);

struct TrainCmdOptions {
  std::string in;
  std::string out;
  int hidden = 96;
  int epochs = 60;
  int batch = 256;
  int chunk = 100;  // K
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  std::string optimizer = "adam";  // or sgd
  std::string loss_curve;          // optional two-column output file
};
void cmd_train(const TrainCmdOptions& opts);

struct RolloutOptions {
  std::string checkpoint;
  std::string task = "cube_transfer";
  int episodes = 50;
  std::uint64_t seed = 0;
  bool no_offload = false;
  double cot = 0.12;
  int mced = 3;
  int mcod = 0;  // 0 = chunk length
  double m = 0.01;
  std::string predicate = "agreement_gated";  // or literal
  double l_inf_ms = 100.0;
  double l_step_ms = 20.0;
  std::string out;          // per-episode report file
  std::string dump_traces;  // optional dataset file of replay frames
  std::string env_config;
};
void cmd_rollout(const RolloutOptions& opts);

struct SweepOptions {
  std::string checkpoint;
  std::string task = "cube_transfer";
  int episodes = 50;
  std::uint64_t seed = 0;
  std::string cot_grid;   // comma-separated; empty = 8 log-spaced defaults
  std::string mcod_grid;  // comma-separated; empty = 1,5,10,K
  int mced = 3;
  double m = 0.01;
  std::string predicate = "agreement_gated";
  double l_inf_ms = 100.0;
  double l_step_ms = 20.0;
  std::string out;  // cell table (CSV)
  std::string env_config;
};
void cmd_sweep(const SweepOptions& opts);

/// Shared helpers (exposed for tests).
std::vector<double> parse_double_list(const std::string& csv);
std::vector<int> parse_int_list(const std::string& csv);

}  // namespace sril
