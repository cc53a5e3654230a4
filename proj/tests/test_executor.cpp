#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sril/executor.hpp"
#include "sril/expert.hpp"
#include "sril/rng.hpp"

using namespace sril;

namespace {

ActionChunk make_chunk(std::int64_t issued_at, std::size_t K,
                       const std::vector<double>& first_pos) {
  ActionChunk chunk;
  chunk.issued_at = issued_at;
  chunk.actions.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    chunk.actions[k].target_pos = first_pos;
    chunk.actions[k].target_vel = std::vector<double>(first_pos.size(), 0.0);
  }
  return chunk;
}

/// Direct-summation oracle: materializes all weights explicitly and
/// normalizes afterwards, accumulating in long double.
Action ensemble_oracle(const ChunkHistory& history, std::int64_t target_t, double m) {
  const auto overlaps = history.overlapping(target_t);
  const std::size_t J = overlaps.front().action->target_pos.size();
  std::vector<long double> wpos(J, 0.0L), wvel(J, 0.0L);
  long double wsum = 0.0L;
  for (auto it = overlaps.rbegin(); it != overlaps.rend(); ++it) {
    const long double w = std::exp(static_cast<long double>(-m * it->age));
    wsum += w;
    for (std::size_t j = 0; j < J; ++j) {
      wpos[j] += w * static_cast<long double>(it->action->target_pos[j]);
      wvel[j] += w * static_cast<long double>(it->action->target_vel[j]);
    }
  }
  Action out;
  for (std::size_t j = 0; j < J; ++j) {
    out.target_pos.push_back(static_cast<double>(wpos[j] / wsum));
    out.target_vel.push_back(static_cast<double>(wvel[j] / wsum));
  }
  return out;
}

}  // namespace

TEST_SUITE("executor") {

TEST_CASE("chunk history push, capacity and ordering") {
  ChunkHistory history(3);
  CHECK(history.empty());
  history.push(make_chunk(0, 5, {1.0}));
  CHECK(history.size() == 1);
  history.push(make_chunk(1, 5, {2.0}));
  history.push(make_chunk(2, 5, {3.0}));
  history.push(make_chunk(3, 5, {4.0}));
  CHECK(history.size() == 3);
  CHECK(history.chunks().front().issued_at == 1);  // oldest evicted

  CHECK_THROWS(history.push(make_chunk(3, 5, {5.0})));
  CHECK_THROWS(history.push(make_chunk(1, 5, {5.0})));
}

TEST_CASE("query returns ages 0 and 1 for chunks issued at T-1 and T") {
  ChunkHistory history(20);
  history.push(make_chunk(9, 20, {1.0}));   // T-1
  history.push(make_chunk(10, 20, {2.0}));  // T
  const auto overlaps = history.overlapping(11);  // T+1
  REQUIRE(overlaps.size() == 2);
  CHECK(overlaps[0].age == 0);
  CHECK(overlaps[0].action->target_pos[0] == 2.0);
  CHECK(overlaps[1].age == 1);
  CHECK(overlaps[1].action->target_pos[0] == 1.0);
}

TEST_CASE("expired chunks no longer overlap") {
  ChunkHistory history(10);
  history.push(make_chunk(0, 3, {1.0}));  // covers 1..3
  history.push(make_chunk(5, 3, {2.0}));  // covers 6..8
  CHECK(history.overlap_count(4) == 0);
  CHECK(history.overlap_count(3) == 1);
  CHECK(history.overlap_count(6) == 1);
  CHECK_THROWS(ensemble_action(history, 4, 0.1));
}

TEST_CASE("ensemble hand cases") {
  ChunkHistory history(5);
  history.push(make_chunk(0, 5, {4.0}));  // age 1 at target 2
  history.push(make_chunk(1, 5, {2.0}));  // age 0 at target 2

  Action mean = ensemble_action(history, 2, 0.0);
  CHECK(mean.target_pos[0] == doctest::Approx(3.0).epsilon(1e-15));

  Action weighted = ensemble_action(history, 2, std::log(2.0));
  CHECK(weighted.target_pos[0] == doctest::Approx(8.0 / 3.0).epsilon(1e-12));

  ChunkHistory single(5);
  single.push(make_chunk(0, 5, {7.25}));
  CHECK(ensemble_action(single, 1, 0.7).target_pos[0] == doctest::Approx(7.25).epsilon(1e-15));
}

TEST_CASE("ensemble matches the brute-force oracle on 1000 random instances") {
  Rng rng(2024);
  for (int iter = 0; iter < 1000; ++iter) {
    const std::size_t K = 2 + rng.next_below(12);
    const std::size_t J = 1 + rng.next_below(4);
    const double m = rng.uniform(0.0, 1.5);
    ChunkHistory history(K);
    const std::size_t pushes = 1 + rng.next_below(K);
    for (std::size_t p = 0; p < pushes; ++p) {
      ActionChunk chunk;
      chunk.issued_at = static_cast<std::int64_t>(p);
      chunk.actions.resize(K);
      for (auto& a : chunk.actions) {
        for (std::size_t j = 0; j < J; ++j) {
          a.target_pos.push_back(rng.gaussian(0, 2));
          a.target_vel.push_back(rng.gaussian(0, 2));
        }
      }
      history.push(std::move(chunk));
    }
    const std::int64_t target = static_cast<std::int64_t>(pushes);  // covered by all
    const Action fast = ensemble_action(history, target, m);
    const Action oracle = ensemble_oracle(history, target, m);
    for (std::size_t j = 0; j < J; ++j) {
      CHECK(std::abs(fast.target_pos[j] - oracle.target_pos[j]) < 1e-12);
      CHECK(std::abs(fast.target_vel[j] - oracle.target_vel[j]) < 1e-12);
    }
  }
}

TEST_CASE("COR hand cases") {
  ActionStats stats;
  stats.mu = {0.0};
  stats.sigma = {2.0};

  ChunkHistory identical(4);
  identical.push(make_chunk(0, 4, {1.5}));
  identical.push(make_chunk(1, 4, {1.5}));
  identical.push(make_chunk(2, 4, {1.5}));
  CHECK(compute_cor(identical, 3, stats) == doctest::Approx(0.0).epsilon(1e-15));

  // one joint, predictions [0, 2], mu=0, sigma=2 -> normalized [0, 1] -> std 0.5
  ChunkHistory two(4);
  two.push(make_chunk(0, 4, {0.0}));
  two.push(make_chunk(1, 4, {2.0}));
  CHECK(compute_cor(two, 2, stats) == doctest::Approx(0.5).epsilon(1e-12));

  // two joints each with predictions [0, 2] -> additive over joints
  ActionStats stats2;
  stats2.mu = {0.0, 0.0};
  stats2.sigma = {2.0, 2.0};
  ChunkHistory both(4);
  both.push(make_chunk(0, 4, {0.0, 0.0}));
  both.push(make_chunk(1, 4, {2.0, 2.0}));
  CHECK(compute_cor(both, 2, stats2) == doctest::Approx(1.0).epsilon(1e-12));

  // zero-sigma joints contribute nothing
  ActionStats degenerate;
  degenerate.mu = {0.0, 0.0};
  degenerate.sigma = {2.0, 0.0};
  CHECK(compute_cor(both, 2, degenerate) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("COR is invariant under consistent affine reparameterization") {
  Rng rng(5);
  for (int iter = 0; iter < 50; ++iter) {
    const double c = rng.uniform(0.2, 3.0) * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
    const double b = rng.gaussian(0, 2);
    ActionStats stats;
    stats.mu = {rng.gaussian(0, 1)};
    stats.sigma = {rng.uniform(0.5, 2.0)};
    ChunkHistory raw(6), mapped(6);
    for (int p = 0; p < 4; ++p) {
      const double v = rng.gaussian(0, 1);
      raw.push(make_chunk(p, 6, {v}));
      mapped.push(make_chunk(p, 6, {c * v + b}));
    }
    ActionStats mapped_stats;
    mapped_stats.mu = {c * stats.mu[0] + b};
    mapped_stats.sigma = {std::abs(c) * stats.sigma[0]};
    CHECK(compute_cor(raw, 4, stats) ==
          doctest::Approx(compute_cor(mapped, 4, mapped_stats)).epsilon(1e-10));
  }
}

TEST_CASE("expected COR does not decrease with noise std (Monte Carlo)") {
  Rng rng(99);
  ActionStats stats;
  stats.mu = {0.0, 0.0};
  stats.sigma = {1.0, 1.0};
  double previous = -1.0;
  for (double noise : {0.0, 0.05, 0.1}) {
    double total = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      ChunkHistory history(8);
      for (int p = 0; p < 5; ++p)
        history.push(make_chunk(p, 8, {0.3 + rng.gaussian(0, noise),
                                       -0.2 + rng.gaussian(0, noise)}));
      total += compute_cor(history, 5, stats);
    }
    const double mean_cor = total / 1000.0;
    CHECK(mean_cor >= previous);
    previous = mean_cor;
  }
}

TEST_CASE("decide predicate covers the spec cases") {
  OffloadConfig cfg;
  cfg.cot = 0.2;
  cfg.mced = 3;

  // history shorter than mced -> infer regardless of cor
  CHECK(decide(0.0, 2, 0, cfg, 10) == Decision::Infer);
  // agreement-gated: low disagreement, engaged, guard open -> skip
  CHECK(decide(0.1, 3, 0, cfg, 10) == Decision::Skip);
  // guard exhausted
  CHECK(decide(0.1, 3, 10, cfg, 10) == Decision::Infer);
  // high disagreement -> infer
  CHECK(decide(0.5, 3, 0, cfg, 10) == Decision::Infer);

  OffloadConfig literal = cfg;
  literal.predicate = PredicateMode::Literal;
  // the printed inequality: skip when COR > COT
  CHECK(decide(0.3, 3, 0, literal, 10) == Decision::Skip);
  CHECK(decide(0.1, 3, 0, literal, 10) == Decision::Infer);
}

TEST_CASE("lowering cot never increases skips on a fixed recorded trace") {
  Rng rng(7);
  OffloadConfig cfg;
  cfg.mced = 2;
  std::vector<std::tuple<double, std::size_t, int>> fixed_trace;
  for (int i = 0; i < 400; ++i)
    fixed_trace.emplace_back(rng.uniform(0, 0.5), 1 + rng.next_below(6),
                             static_cast<int>(rng.next_below(4)));
  int previous = std::numeric_limits<int>::max();
  for (double cot : {0.4, 0.3, 0.2, 0.1, 0.05, 0.0}) {
    cfg.cot = cot;
    int skips = 0;
    for (const auto& [cor, overlap, consecutive] : fixed_trace)
      if (decide(cor, overlap, consecutive, cfg, 5) == Decision::Skip) ++skips;
    CHECK(skips <= previous);
    previous = skips;
  }
}

TEST_CASE("offloading disabled reproduces the baseline executor bitwise") {
  const TaskSpec task = TaskSpec::make(TaskName::CubeTransfer);
  const SimParams params = SimParams::defaults();
  ScriptedExpert policy(task, params, 20);
  ActionStats stats;
  stats.mu.assign(6, 0.0);
  stats.sigma.assign(6, 1.0);

  OffloadConfig off;
  off.cot = -1.0;  // cor >= 0 can never pass the agreement gate
  LatencyModel latency;

  for (std::uint64_t seed : {0ull, 1ull, 2ull}) {
    SimEnv env_a(task, params), env_b(task, params);
    EpisodeReport with_logic = run_episode(policy, stats, env_a, off, latency, seed);
    EpisodeReport baseline = run_episode_baseline(policy, env_b, latency, seed, off.m);
    CHECK(with_logic.skip_count == 0);
    CHECK(with_logic.inference_count == with_logic.step_count);
    REQUIRE(with_logic.executed.size() == baseline.executed.size());
    CHECK(with_logic.executed == baseline.executed);
    CHECK(with_logic.success == baseline.success);
  }
}

TEST_CASE("episode accounting and guard invariants hold under offloading") {
  const TaskSpec task = TaskSpec::make(TaskName::CubeTransfer);
  const SimParams params = SimParams::defaults();
  ExpertConfig noise;
  noise.noise_std = 0.01;
  noise.noise_seed = 3;
  ScriptedExpert policy(task, params, 20, noise);

  Dataset demos = generate_demo_dataset(task, params, 3, 0);
  const ActionStats stats = compute_action_stats(demos);

  OffloadConfig cfg;
  cfg.cot = 0.5;
  cfg.mced = 3;
  cfg.mcod = 6;
  LatencyModel latency;

  SimEnv env(task, params);
  EpisodeReport report = run_episode(policy, stats, env, cfg, latency, 0);

  CHECK(report.step_count ==
        report.inference_count + report.skip_count);
  CHECK(report.cost_time_ms ==
        doctest::Approx(report.inference_count * 100.0 + report.step_count * 20.0));
  CHECK(report.skip_count > 0);
  CHECK(report.inference_count < report.step_count);

  int run = 0;
  for (const StepRecord& rec : report.trace) {
    if (!rec.inferred) {
      ++run;
      CHECK(rec.overlap >= cfg.mced);  // no skip without engagement (implies coverage)
      CHECK(run <= cfg.mcod);
    } else {
      run = 0;
    }
  }
}

TEST_CASE("mcod = 1 forbids adjacent skips") {
  const TaskSpec task = TaskSpec::make(TaskName::CubeTransfer);
  const SimParams params = SimParams::defaults();
  ScriptedExpert policy(task, params, 20);
  ActionStats stats;
  stats.mu.assign(6, 0.0);
  stats.sigma.assign(6, 1.0);

  OffloadConfig cfg;
  cfg.cot = 1e9;  // maximally permissive agreement gate
  cfg.mcod = 1;
  SimEnv env(task, params);
  EpisodeReport report = run_episode(policy, stats, env, cfg, LatencyModel{}, 1);
  CHECK(report.skip_count > 0);
  bool previous_skip = false;
  for (const StepRecord& rec : report.trace) {
    const bool skip = !rec.inferred;
    CHECK(!(skip && previous_skip));
    previous_skip = skip;
  }
}

TEST_CASE("default offload config skips on the noise-free expert") {
  const TaskSpec task = TaskSpec::make(TaskName::CubeTransfer);
  const SimParams params = SimParams::defaults();
  ScriptedExpert policy(task, params, 20);
  Dataset demos = generate_demo_dataset(task, params, 2, 0);
  const ActionStats stats = compute_action_stats(demos);

  SimEnv env(task, params);
  EpisodeReport report = run_episode(policy, stats, env, OffloadConfig{}, LatencyModel{}, 0);
  CHECK(report.success);
  CHECK(report.inference_count < report.step_count);
}

}  // TEST_SUITE
