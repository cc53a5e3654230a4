#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sril/butterworth.hpp"
#include "sril/core_types.hpp"
#include "sril/parallel.hpp"

namespace sril {

enum class NormalizationMode { MinMax, ZScore };

enum class AggregationMode {
  PerTrajectory,  // one importance series per demo (default)
  AlignedMean     // literal cross-demo mean, demos truncated to min length
};

struct SpamConfig {
  /// One weight per joint-velocity channel (J) followed by one per eeft
  /// channel (G). Non-negative, summing to 1. Empty means uniform.
  std::vector<double> weights;
  NormalizationMode normalization = NormalizationMode::MinMax;
  AggregationMode aggregation = AggregationMode::PerTrajectory;

  static std::vector<double> uniform_weights(std::size_t J, std::size_t G);

  /// Weights for the simenv joint convention ([shoulder, elbow, gripper]
  /// per arm, one eeft channel per arm): arm joints share 0.88, eeft
  /// channels 0.12, gripper position channels 0. Gripper channels only
  /// move during grasp events and torque channels are constant while
  /// holding, so uniform weights dilute the transit/approach contrast the
  /// stride schedule feeds on.
  static std::vector<double> manipulator_weights(std::size_t J, std::size_t G);
};

struct SampleConfig {
  double fd_hz = 50.0;  // source sampling frequency
  double fm_hz = 10.0;  // target minimum sampling frequency
  /// Temporal scaling factor M = f_d / f_m.
  double scale() const { return fd_hz / fm_hz; }
};

struct ImportanceSeries {
  std::vector<double> raw;       // I_t, in [0,1] under min-max normalization
  std::vector<double> filtered;  // smoothed and clamped to [0,1]
  bool filter_warning = false;   // series too short to filter
};

/// Per-channel normalization. Min-max maps each channel affinely onto
/// [0,1] over its own range; z-score subtracts the mean and divides by
/// the population std. Degenerate (constant / zero-std) channels map to
/// all zeros.
std::vector<std::vector<double>> normalize_channels(
    const std::vector<std::vector<double>>& channels, NormalizationMode mode);

/// Raw importance I_t = w . concat(N(mean |qvel|), N(mean |eeft|)) over
/// the given trajectories (aligned-mean semantics; pass one trajectory
/// for the per-trajectory case). Throws on empty input or bad weights.
std::vector<double> compute_spam(const std::vector<const Trajectory*>& trajs,
                                 const SpamConfig& cfg);
std::vector<double> compute_spam(const Trajectory& traj, const SpamConfig& cfg);

/// Raw importance plus its low-pass smoothed, [0,1]-clamped form.
ImportanceSeries compute_importance(const std::vector<const Trajectory*>& trajs,
                                    const SpamConfig& spam_cfg, const FilterConfig& filter_cfg,
                                    double fs_hz);

/// stride(t) = floor(M * filtered(t)) + 1, in [1, floor(M)+1].
std::vector<int> stride_schedule(const std::vector<double>& filtered, double m_scale);

/// Cursor walk: k0 = 0, k_{i+1} = k_i + strides[k_i], stop at T. The
/// first index is always selected and the final frame T-1 is appended if
/// the cursor jumped past it.
std::vector<std::size_t> select_indices(const std::vector<int>& strides, std::size_t T);

struct TrajectoryDownsampleStats {
  std::string id;
  std::size_t original_frames = 0;
  std::size_t retained_frames = 0;
  double mean_stride = 0.0;  // mean gap between consecutive retained frames
};

struct DownsampleReport {
  std::vector<TrajectoryDownsampleStats> per_trajectory;
  std::map<int, std::int64_t> stride_histogram;  // gap -> count
  std::size_t total_original = 0;
  std::size_t total_retained = 0;
  double retained_fraction() const {
    return total_original == 0
               ? 0.0
               : static_cast<double>(total_retained) / static_cast<double>(total_original);
  }
};

Trajectory downsample_trajectory(const Trajectory& traj, const SpamConfig& spam_cfg,
                                 const FilterConfig& filter_cfg, const SampleConfig& sample_cfg);

/// Downsamples every trajectory (independently or with a shared
/// aligned-mean importance series, per cfg.aggregation) and records the
/// configuration in the output meta. Trajectory-level work is data
/// parallel; both modes give bitwise-identical results.
Dataset downsample_dataset(const Dataset& ds, const SpamConfig& spam_cfg,
                           const FilterConfig& filter_cfg, const SampleConfig& sample_cfg,
                           ParallelMode mode = ParallelMode::OpenMp,
                           DownsampleReport* report = nullptr);

}  // namespace sril
