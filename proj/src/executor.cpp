#include "sril/executor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sril {

ChunkHistory::ChunkHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::runtime_error("chunk history: capacity must be positive");
}

void ChunkHistory::push(ActionChunk chunk) {
  if (!chunks_.empty() && chunk.issued_at <= chunks_.back().issued_at)
    throw std::runtime_error("chunk history: out-of-order chunk (issued_at " +
                             std::to_string(chunk.issued_at) + " after " +
                             std::to_string(chunks_.back().issued_at) + ")");
  chunks_.push_back(std::move(chunk));
  if (chunks_.size() > capacity_) chunks_.pop_front();
}

std::vector<ChunkHistory::Overlap> ChunkHistory::overlapping(std::int64_t target_t) const {
  std::vector<Overlap> out;
  for (auto it = chunks_.rbegin(); it != chunks_.rend(); ++it) {
    const std::int64_t offset = target_t - it->issued_at;  // 1-based position in the chunk
    if (offset < 1) continue;
    if (offset > static_cast<std::int64_t>(it->actions.size())) break;  // older ones end sooner
    Overlap ov;
    ov.age = static_cast<int>(offset - 1);
    ov.action = &it->actions[static_cast<std::size_t>(offset - 1)];
    out.push_back(ov);
  }
  return out;
}

std::size_t ChunkHistory::overlap_count(std::int64_t target_t) const {
  return overlapping(target_t).size();
}

Action ensemble_action(const ChunkHistory& history, std::int64_t target_t, double m) {
  const auto overlaps = history.overlapping(target_t);
  if (overlaps.empty())
    throw std::runtime_error("ensemble_action: no prediction covers timestep " +
                             std::to_string(target_t));
  const std::size_t J = overlaps.front().action->target_pos.size();
  Action out;
  out.target_pos.assign(J, 0.0);
  out.target_vel.assign(J, 0.0);
  double weight_sum = 0.0;
  for (const auto& ov : overlaps) {
    const double w = std::exp(-m * static_cast<double>(ov.age));
    weight_sum += w;
    for (std::size_t j = 0; j < J; ++j) {
      out.target_pos[j] += w * ov.action->target_pos[j];
      out.target_vel[j] += w * ov.action->target_vel[j];
    }
  }
  for (std::size_t j = 0; j < J; ++j) {
    out.target_pos[j] /= weight_sum;
    out.target_vel[j] /= weight_sum;
  }
  return out;
}

double compute_cor(const ChunkHistory& history, std::int64_t target_t,
                   const ActionStats& stats) {
  const auto overlaps = history.overlapping(target_t);
  if (overlaps.empty())
    throw std::runtime_error("compute_cor: no prediction covers timestep " +
                             std::to_string(target_t));
  const std::size_t J = stats.mu.size();
  const double n = static_cast<double>(overlaps.size());
  double cor = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    if (!(stats.sigma[j] > 0.0)) continue;  // zero-scale joints contribute 0
    double mean = 0.0;
    for (const auto& ov : overlaps)
      mean += (ov.action->target_pos[j] - stats.mu[j]) / stats.sigma[j];
    mean /= n;
    double var = 0.0;
    for (const auto& ov : overlaps) {
      const double v = (ov.action->target_pos[j] - stats.mu[j]) / stats.sigma[j] - mean;
      var += v * v;
    }
    cor += std::sqrt(var / n);
  }
  return cor;
}

Decision decide(double cor, std::size_t overlap, int consecutive_skips,
                const OffloadConfig& cfg, int mcod_resolved) {
  const bool engaged = overlap >= static_cast<std::size_t>(cfg.mced);
  const bool guard = consecutive_skips < mcod_resolved;
  const bool trigger =
      cfg.predicate == PredicateMode::AgreementGated ? cor <= cfg.cot : cor > cfg.cot;
  return (trigger && engaged && guard) ? Decision::Skip : Decision::Infer;
}

EpisodeReport run_episode(const PolicyOracle& policy, const ActionStats& stats, SimEnv& env,
                          const OffloadConfig& cfg, const LatencyModel& latency,
                          std::uint64_t seed, const EpisodeOptions& opts) {
  env.reset(seed);
  const std::size_t K = policy.chunk_length();
  const int mcod = cfg.mcod > 0 ? cfg.mcod : static_cast<int>(K);
  if (cfg.mced < 1) throw std::runtime_error("run_episode: mced must be >= 1");

  ChunkHistory history(K);
  EpisodeReport report;
  report.seed = seed;

  bool infer_next = true;
  double pending_cor = std::numeric_limits<double>::infinity();
  std::size_t pending_overlap = 0;
  int consecutive_skips = 0;

  while (true) {
    const std::int64_t target_t = env.world().tick + 1;
    if (infer_next) {
      history.push(policy.predict_chunk({env.observation(), env.sensory_state()},
                                        env.world().tick));
      ++report.inference_count;
      consecutive_skips = 0;
    } else {
      ++report.skip_count;
      ++consecutive_skips;
    }

    const Action action = ensemble_action(history, target_t, cfg.m);
    if (opts.record_frames)
      report.frames.push_back(
          {env.world().tick, env.observation(), env.sensory_state(), action});
    env.step(action);
    ++report.step_count;
    if (opts.record_actions) report.executed.push_back(action);
    if (opts.record_trace)
      report.trace.push_back({target_t, infer_next, pending_cor,
                              static_cast<int>(pending_overlap)});

    if (env.score().success() ||
        report.step_count >= static_cast<std::int64_t>(env.task().step_limit))
      break;

    const std::int64_t next_t = env.world().tick + 1;
    pending_overlap = history.overlap_count(next_t);
    pending_cor = pending_overlap >= 1 ? compute_cor(history, next_t, stats)
                                       : std::numeric_limits<double>::infinity();
    infer_next =
        decide(pending_cor, pending_overlap, consecutive_skips, cfg, mcod) == Decision::Infer;
  }

  report.success = env.score().success();
  report.subgoals = env.score().flags;
  report.cost_time_ms = static_cast<double>(report.inference_count) * latency.l_inf_ms +
                        static_cast<double>(report.step_count) * latency.l_step_ms;
  return report;
}

EpisodeReport run_episode_baseline(const PolicyOracle& policy, SimEnv& env,
                                   const LatencyModel& latency, std::uint64_t seed, double m,
                                   const EpisodeOptions& opts) {
  env.reset(seed);
  ChunkHistory history(policy.chunk_length());
  EpisodeReport report;
  report.seed = seed;

  while (true) {
    const std::int64_t target_t = env.world().tick + 1;
    history.push(policy.predict_chunk({env.observation(), env.sensory_state()},
                                      env.world().tick));
    ++report.inference_count;

    const Action action = ensemble_action(history, target_t, m);
    if (opts.record_frames)
      report.frames.push_back(
          {env.world().tick, env.observation(), env.sensory_state(), action});
    env.step(action);
    ++report.step_count;
    if (opts.record_actions) report.executed.push_back(action);
    if (opts.record_trace)
      report.trace.push_back(
          {target_t, true, std::numeric_limits<double>::infinity(), 0});

    if (env.score().success() ||
        report.step_count >= static_cast<std::int64_t>(env.task().step_limit))
      break;
  }

  report.success = env.score().success();
  report.subgoals = env.score().flags;
  report.cost_time_ms = static_cast<double>(report.inference_count) * latency.l_inf_ms +
                        static_cast<double>(report.step_count) * latency.l_step_ms;
  return report;
}

}  // namespace sril
