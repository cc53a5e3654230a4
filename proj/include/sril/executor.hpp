#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "sril/core_types.hpp"
#include "sril/policy.hpp"
#include "sril/simenv.hpp"

namespace sril {

/// Ring buffer of the K most recent chunks, ordered by issue time. A
/// chunk issued at T covers timesteps T+1 .. T+K, so for a queried
/// target step the retained predictions have ages k = 0 .. K-1.
class ChunkHistory {
 public:
  explicit ChunkHistory(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return chunks_.size(); }
  bool empty() const { return chunks_.empty(); }

  /// Throws if the chunk is not strictly newer than the newest retained.
  void push(ActionChunk chunk);

  struct Overlap {
    int age = 0;  // k: steps since this prediction was issued
    const Action* action = nullptr;
  };

  /// All retained predictions covering target_t, newest first.
  std::vector<Overlap> overlapping(std::int64_t target_t) const;
  std::size_t overlap_count(std::int64_t target_t) const;

  const std::deque<ActionChunk>& chunks() const { return chunks_; }

 private:
  std::size_t capacity_;
  std::deque<ActionChunk> chunks_;
};

enum class PredicateMode {
  AgreementGated,  // skip when predictions agree (COR <= COT)
  Literal          // the printed inequality: skip when COR > COT
};

struct OffloadConfig {
  double cot = 0.12;  // cognitive offloading threshold
  int mced = 3;       // minimum overlapping predictions before any skip
  int mcod = 0;       // max consecutive skips; 0 means use chunk length K
  double m = 0.01;    // temporal ensemble decay rate
  PredicateMode predicate = PredicateMode::AgreementGated;
};

/// Modeled per-operation costs standing in for wall-clock time.
struct LatencyModel {
  double l_inf_ms = 100.0;
  double l_step_ms = 20.0;
};

/// Exponentially weighted ensemble (weights exp(-m*age), normalized over
/// the available overlapping predictions) applied componentwise to
/// target positions and velocities. Throws if nothing covers target_t.
Action ensemble_action(const ChunkHistory& history, std::int64_t target_t, double m);

/// Sum over joints (with sigma > 0) of the population std of the
/// scale-normalized overlapping target positions. 0 means all retained
/// predictions agree exactly. Throws if nothing covers target_t.
double compute_cor(const ChunkHistory& history, std::int64_t target_t, const ActionStats& stats);

enum class Decision { Skip, Infer };

/// Skip/infer predicate. overlap is the number of predictions covering
/// the upcoming step; mcod must already be resolved (> 0).
Decision decide(double cor, std::size_t overlap, int consecutive_skips,
                const OffloadConfig& cfg, int mcod_resolved);

struct StepRecord {
  std::int64_t t = 0;      // timestep the executed action targeted
  bool inferred = true;    // false = the policy call was skipped
  double cor = 0.0;        // COR at the decision (infinity when no coverage)
  int overlap = 0;         // overlapping predictions at the decision
};

struct EpisodeReport {
  std::uint64_t seed = 0;
  bool success = false;
  std::vector<std::pair<std::string, bool>> subgoals;
  std::int64_t step_count = 0;
  std::int64_t inference_count = 0;
  std::int64_t skip_count = 0;
  double cost_time_ms = 0.0;
  std::vector<Action> executed;    // the action trace
  std::vector<StepRecord> trace;   // one record per executed step
  std::vector<Frame> frames;       // full replay frames when requested
};

struct EpisodeOptions {
  bool record_actions = true;
  bool record_trace = true;
  bool record_frames = false;  // capture (obs, state, action) per step for replay dumps
};

/// Runs one episode with the skip/infer state machine. During offload
/// windows the ensemble executes from the frozen history; a window ends
/// when the predicate, the mcod guard, or prediction coverage stops it.
/// Deterministic given the seed.
EpisodeReport run_episode(const PolicyOracle& policy, const ActionStats& stats, SimEnv& env,
                          const OffloadConfig& cfg, const LatencyModel& latency,
                          std::uint64_t seed, const EpisodeOptions& opts = {});

/// Plain chunk-ensemble executor with no offloading code path: one
/// inference per step, same ensemble (decay m). The reference the
/// offloading executor must match bitwise when its predicate never fires.
EpisodeReport run_episode_baseline(const PolicyOracle& policy, SimEnv& env,
                                   const LatencyModel& latency, std::uint64_t seed,
                                   double m = 0.01, const EpisodeOptions& opts = {});

}  // namespace sril
