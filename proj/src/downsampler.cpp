#include "sril/downsampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sril {

namespace {

void check_weights(const std::vector<double>& w, std::size_t expected) {
  if (w.size() != expected)
    throw std::runtime_error("spam weights length " + std::to_string(w.size()) +
                             " does not match channel count " + std::to_string(expected));
  double sum = 0.0;
  for (double v : w) {
    if (v < 0.0) throw std::runtime_error("spam weights must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::runtime_error("spam weights must sum to 1 (got " + std::to_string(sum) + ")");
}

std::string mode_name(NormalizationMode m) {
  return m == NormalizationMode::MinMax ? "min_max" : "z_score";
}

std::string mode_name(AggregationMode m) {
  return m == AggregationMode::PerTrajectory ? "per_trajectory" : "aligned_mean";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Trajectory take_indices(const Trajectory& traj, const std::vector<std::size_t>& indices) {
  Trajectory out;
  out.id = traj.id + "#ds";
  out.fs_hz = traj.fs_hz;
  out.layout = traj.layout;
  out.frames.reserve(indices.size());
  for (std::size_t idx : indices) out.frames.push_back(traj.frames[idx]);
  return out;
}

void accumulate_stats(const Trajectory& original, const std::vector<std::size_t>& indices,
                      DownsampleReport& report) {
  TrajectoryDownsampleStats st;
  st.id = original.id;
  st.original_frames = original.frames.size();
  st.retained_frames = indices.size();
  double gap_sum = 0.0;
  for (std::size_t i = 1; i < indices.size(); ++i) {
    const int gap = static_cast<int>(indices[i] - indices[i - 1]);
    report.stride_histogram[gap] += 1;
    gap_sum += gap;
  }
  st.mean_stride = indices.size() > 1 ? gap_sum / static_cast<double>(indices.size() - 1) : 0.0;
  report.total_original += st.original_frames;
  report.total_retained += st.retained_frames;
  report.per_trajectory.push_back(std::move(st));
}

}  // namespace

std::vector<double> SpamConfig::uniform_weights(std::size_t J, std::size_t G) {
  const std::size_t n = J + G;
  return std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
}

std::vector<double> SpamConfig::manipulator_weights(std::size_t J, std::size_t G) {
  if (J % 3 != 0 || G == 0) return uniform_weights(J, G);
  std::vector<double> w(J + G, 0.0);
  const std::size_t arm_joints = 2 * (J / 3);
  for (std::size_t j = 0; j < J; ++j)
    if (j % 3 != 2) w[j] = 0.88 / static_cast<double>(arm_joints);
  for (std::size_t g = 0; g < G; ++g) w[J + g] = 0.12 / static_cast<double>(G);
  return w;
}

std::vector<std::vector<double>> normalize_channels(
    const std::vector<std::vector<double>>& channels, NormalizationMode mode) {
  if (channels.empty()) throw std::runtime_error("normalize_channels: no channels");
  std::vector<std::vector<double>> out(channels.size());
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const std::vector<double>& ch = channels[c];
    if (ch.empty()) throw std::runtime_error("normalize_channels: empty channel");
    std::vector<double>& dst = out[c];
    dst.resize(ch.size());
    if (mode == NormalizationMode::MinMax) {
      const auto [lo_it, hi_it] = std::minmax_element(ch.begin(), ch.end());
      const double lo = *lo_it, hi = *hi_it;
      if (hi - lo <= 0.0) {
        std::fill(dst.begin(), dst.end(), 0.0);
      } else {
        for (std::size_t t = 0; t < ch.size(); ++t) dst[t] = (ch[t] - lo) / (hi - lo);
      }
    } else {
      double mean = 0.0;
      for (double v : ch) mean += v;
      mean /= static_cast<double>(ch.size());
      double var = 0.0;
      for (double v : ch) var += (v - mean) * (v - mean);
      const double sd = std::sqrt(var / static_cast<double>(ch.size()));
      if (sd <= 0.0) {
        std::fill(dst.begin(), dst.end(), 0.0);
      } else {
        for (std::size_t t = 0; t < ch.size(); ++t) dst[t] = (ch[t] - mean) / sd;
      }
    }
  }
  return out;
}

std::vector<double> compute_spam(const std::vector<const Trajectory*>& trajs,
                                 const SpamConfig& cfg) {
  if (trajs.empty()) throw std::runtime_error("compute_spam: no trajectories");
  for (const Trajectory* t : trajs)
    if (t == nullptr || t->frames.empty()) throw std::runtime_error("compute_spam: empty trajectory");

  const std::size_t J = joint_dim(*trajs.front());
  const std::size_t G = gripper_dim(*trajs.front());
  std::size_t T = trajs.front()->frames.size();
  for (const Trajectory* t : trajs) {
    if (joint_dim(*t) != J || gripper_dim(*t) != G)
      throw std::runtime_error("compute_spam: trajectories disagree on J or G");
    T = std::min(T, t->frames.size());
  }

  std::vector<double> weights =
      cfg.weights.empty() ? SpamConfig::uniform_weights(J, G) : cfg.weights;
  check_weights(weights, J + G);

  // Channel = per-joint |qvel| (then per-gripper |eeft|) averaged across
  // demos at each aligned timestep. Magnitudes, not signed values: signed
  // averaging across demos would cancel opposite motions.
  std::vector<std::vector<double>> channels(J + G, std::vector<double>(T, 0.0));
  const double inv_n = 1.0 / static_cast<double>(trajs.size());
  for (const Trajectory* traj : trajs) {
    for (std::size_t t = 0; t < T; ++t) {
      const SensoryState& s = traj->frames[t].state;
      for (std::size_t j = 0; j < J; ++j) channels[j][t] += std::abs(s.qvel[j]) * inv_n;
      for (std::size_t g = 0; g < G; ++g) channels[J + g][t] += std::abs(s.eeft[g]) * inv_n;
    }
  }

  const auto normalized = normalize_channels(channels, cfg.normalization);
  std::vector<double> importance(T, 0.0);
  for (std::size_t c = 0; c < normalized.size(); ++c)
    for (std::size_t t = 0; t < T; ++t) importance[t] += weights[c] * normalized[c][t];
  return importance;
}

std::vector<double> compute_spam(const Trajectory& traj, const SpamConfig& cfg) {
  return compute_spam(std::vector<const Trajectory*>{&traj}, cfg);
}

ImportanceSeries compute_importance(const std::vector<const Trajectory*>& trajs,
                                    const SpamConfig& spam_cfg, const FilterConfig& filter_cfg,
                                    double fs_hz) {
  ImportanceSeries series;
  series.raw = compute_spam(trajs, spam_cfg);
  FilterOutput filt = butterworth_lowpass(series.raw, filter_cfg, fs_hz);
  series.filter_warning = filt.too_short;
  series.filtered = std::move(filt.values);
  // Zero-phase filtering can overshoot; the stride formula expects [0,1].
  for (double& v : series.filtered) v = std::clamp(v, 0.0, 1.0);
  return series;
}

std::vector<int> stride_schedule(const std::vector<double>& filtered, double m_scale) {
  if (!(m_scale >= 1.0)) throw std::runtime_error("stride_schedule: M must be >= 1");
  std::vector<int> strides(filtered.size());
  for (std::size_t t = 0; t < filtered.size(); ++t)
    strides[t] = static_cast<int>(std::floor(m_scale * filtered[t])) + 1;
  return strides;
}

std::vector<std::size_t> select_indices(const std::vector<int>& strides, std::size_t T) {
  std::vector<std::size_t> indices;
  if (T == 0) return indices;
  std::size_t k = 0;
  while (k < T) {
    indices.push_back(k);
    const std::size_t at = std::min(k, strides.size() - 1);
    k += static_cast<std::size_t>(std::max(1, strides[at]));
  }
  // Executors and success checks need the terminal state.
  if (indices.back() != T - 1) indices.push_back(T - 1);
  return indices;
}

Trajectory downsample_trajectory(const Trajectory& traj, const SpamConfig& spam_cfg,
                                 const FilterConfig& filter_cfg, const SampleConfig& sample_cfg) {
  if (traj.frames.empty()) throw std::runtime_error("downsample_trajectory: empty trajectory");
  const ImportanceSeries imp =
      compute_importance({&traj}, spam_cfg, filter_cfg, traj.fs_hz);
  const auto strides = stride_schedule(imp.filtered, sample_cfg.scale());
  const auto indices = select_indices(strides, traj.frames.size());
  return take_indices(traj, indices);
}

Dataset downsample_dataset(const Dataset& ds, const SpamConfig& spam_cfg,
                           const FilterConfig& filter_cfg, const SampleConfig& sample_cfg,
                           ParallelMode mode, DownsampleReport* report) {
  if (ds.trajectories.empty()) throw std::runtime_error("downsample_dataset: empty dataset");

  const std::size_t n = ds.trajectories.size();
  std::vector<std::vector<std::size_t>> selected(n);

  if (spam_cfg.aggregation == AggregationMode::AlignedMean) {
    std::vector<const Trajectory*> ptrs;
    ptrs.reserve(n);
    for (const Trajectory& t : ds.trajectories) ptrs.push_back(&t);
    const ImportanceSeries imp =
        compute_importance(ptrs, spam_cfg, filter_cfg, ds.trajectories.front().fs_hz);
    const auto strides = stride_schedule(imp.filtered, sample_cfg.scale());
    for (std::size_t i = 0; i < n; ++i)
      selected[i] = select_indices(strides, ds.trajectories[i].frames.size());
  } else {
    const auto one = [&](std::size_t i) {
      const Trajectory& traj = ds.trajectories[i];
      const ImportanceSeries imp =
          compute_importance({&traj}, spam_cfg, filter_cfg, traj.fs_hz);
      const auto strides = stride_schedule(imp.filtered, sample_cfg.scale());
      selected[i] = select_indices(strides, traj.frames.size());
    };
    if (mode == ParallelMode::OpenMp) {
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
        one(static_cast<std::size_t>(i));
    } else {
      for (std::size_t i = 0; i < n; ++i) one(i);
    }
  }

  Dataset out;
  out.meta = ds.meta;
  out.meta["downsample.fm_hz"] = format_double(sample_cfg.fm_hz);
  out.meta["downsample.fd_hz"] = format_double(sample_cfg.fd_hz);
  out.meta["downsample.filter_order"] = std::to_string(filter_cfg.order);
  out.meta["downsample.filter_cutoff_hz"] = format_double(filter_cfg.cutoff_hz);
  out.meta["downsample.filter_zero_phase"] = filter_cfg.zero_phase ? "true" : "false";
  out.meta["downsample.normalization"] = mode_name(spam_cfg.normalization);
  out.meta["downsample.aggregation"] = mode_name(spam_cfg.aggregation);
  {
    std::string w;
    const std::vector<double> weights =
        spam_cfg.weights.empty()
            ? SpamConfig::uniform_weights(joint_dim(ds.trajectories.front()),
                                          gripper_dim(ds.trajectories.front()))
            : spam_cfg.weights;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (i) w += ",";
      w += format_double(weights[i]);
    }
    out.meta["downsample.weights"] = w;
  }

  out.trajectories.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.trajectories.push_back(take_indices(ds.trajectories[i], selected[i]));
    if (report != nullptr) accumulate_stats(ds.trajectories[i], selected[i], *report);
  }
  return out;
}

}  // namespace sril
