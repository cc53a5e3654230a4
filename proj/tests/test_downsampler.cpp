#include <doctest.h>

#include <cmath>

#include "sril/downsampler.hpp"
#include "sril/rng.hpp"

using namespace sril;

namespace {

Trajectory velocity_trajectory(const std::vector<double>& qvel_profile, double fs = 50.0) {
  Trajectory traj;
  traj.id = "synthetic";
  traj.fs_hz = fs;
  traj.layout = {{"x", 0, 1}};
  for (std::size_t i = 0; i < qvel_profile.size(); ++i) {
    Frame fr;
    fr.t = static_cast<std::int64_t>(i);
    fr.obs.features = {0.0};
    fr.state.qpos = {0.0};
    fr.state.qvel = {qvel_profile[i]};
    fr.state.eeft = {0.0};
    fr.action.target_pos = {0.0};
    fr.action.target_vel = {0.0};
    traj.frames.push_back(fr);
  }
  return traj;
}

}  // namespace

TEST_SUITE("downsampler") {

TEST_CASE("min-max normalization hand cases") {
  auto out = normalize_channels({{0, 1, 0}}, NormalizationMode::MinMax);
  CHECK(out[0] == std::vector<double>{0, 1, 0});

  out = normalize_channels({{2, 2, 2}}, NormalizationMode::MinMax);
  CHECK(out[0] == std::vector<double>{0, 0, 0});

  out = normalize_channels({{0, 2, 4}}, NormalizationMode::MinMax);
  CHECK(out[0][0] == doctest::Approx(0.0));
  CHECK(out[0][1] == doctest::Approx(0.5));
  CHECK(out[0][2] == doctest::Approx(1.0));
}

TEST_CASE("z-score normalization zero rule") {
  auto out = normalize_channels({{3, 3, 3, 3}}, NormalizationMode::ZScore);
  CHECK(out[0] == std::vector<double>(4, 0.0));

  out = normalize_channels({{-1, 1}}, NormalizationMode::ZScore);
  CHECK(out[0][0] == doctest::Approx(-1.0));
  CHECK(out[0][1] == doctest::Approx(1.0));
}

TEST_CASE("spam: all-zero velocities and torques give zero importance") {
  Trajectory traj = velocity_trajectory(std::vector<double>(20, 0.0));
  SpamConfig cfg;
  auto raw = compute_spam(traj, cfg);
  for (double v : raw) CHECK(v == 0.0);
}

TEST_CASE("spam hand case: one joint, one gripper, weights 0.5/0.5") {
  Trajectory traj = velocity_trajectory({0.0, 1.0, 0.0});
  SpamConfig cfg;
  cfg.weights = {0.5, 0.5};
  auto raw = compute_spam(traj, cfg);
  REQUIRE(raw.size() == 3);
  CHECK(raw[0] == doctest::Approx(0.0));
  CHECK(raw[1] == doctest::Approx(0.5));
  CHECK(raw[2] == doctest::Approx(0.0));
}

TEST_CASE("per-trajectory mode equals aligned-mean on a single demo") {
  Rng rng(3);
  std::vector<double> profile(40);
  for (double& v : profile) v = rng.uniform(-2, 2);
  Trajectory traj = velocity_trajectory(profile);
  SpamConfig cfg;
  auto a = compute_spam(traj, cfg);
  auto b = compute_spam(std::vector<const Trajectory*>{&traj}, cfg);
  CHECK(a == b);
}

TEST_CASE("spam invariant to positive rescaling of one channel under min-max") {
  Rng rng(17);
  std::vector<double> profile(60);
  for (double& v : profile) v = rng.uniform(0, 1.5);
  Trajectory traj = velocity_trajectory(profile);
  SpamConfig cfg;
  auto before = compute_spam(traj, cfg);
  for (Frame& fr : traj.frames) fr.state.qvel[0] *= 10.0;
  auto after = compute_spam(traj, cfg);
  REQUIRE(before.size() == after.size());
  for (std::size_t t = 0; t < before.size(); ++t)
    CHECK(before[t] == doctest::Approx(after[t]).epsilon(1e-12));
}

TEST_CASE("spam rejects empty trajectory and bad weights") {
  Trajectory empty;
  CHECK_THROWS(compute_spam(empty, SpamConfig{}));
  Trajectory traj = velocity_trajectory({0.1, 0.2});
  SpamConfig bad;
  bad.weights = {0.9, 0.9};
  CHECK_THROWS(compute_spam(traj, bad));
}

TEST_CASE("stride schedule hand cases") {
  CHECK(stride_schedule({0.0, 0.2, 0.5, 1.0}, 5.0) == std::vector<int>{1, 2, 3, 6});
  CHECK(stride_schedule(std::vector<double>(4, 0.0), 5.0) == std::vector<int>(4, 1));
  CHECK(stride_schedule(std::vector<double>(3, 1.0), 5.0) == std::vector<int>(3, 6));
}

TEST_CASE("stride schedule bounded and monotone in filtered value") {
  Rng rng(5);
  const double m_scale = 7.5;
  for (int i = 0; i < 500; ++i) {
    double x = rng.uniform01();
    double y = rng.uniform01();
    if (x > y) std::swap(x, y);
    auto s = stride_schedule({x, y}, m_scale);
    CHECK(s[0] >= 1);
    CHECK(s[1] <= static_cast<int>(std::floor(m_scale)) + 1);
    CHECK(s[0] <= s[1]);
  }
}

TEST_CASE("select_indices cursor walks") {
  CHECK(select_indices(std::vector<int>(7, 2), 7) == std::vector<std::size_t>{0, 2, 4, 6});
  CHECK(select_indices(std::vector<int>(5, 1), 5) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  // 0 -> +3 -> 3 -> +1 -> 4 -> +2 -> 6 (stop); 5 appended by the last-frame rule
  CHECK(select_indices({3, 1, 1, 1, 2, 1}, 6) == std::vector<std::size_t>{0, 3, 4, 5});
}

TEST_CASE("selected indices strictly increasing, start at 0, all below T") {
  Rng rng(23);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t T = 2 + rng.next_below(200);
    std::vector<int> strides(T);
    for (int& s : strides) s = 1 + static_cast<int>(rng.next_below(6));
    auto idx = select_indices(strides, T);
    REQUIRE(!idx.empty());
    CHECK(idx.front() == 0);
    CHECK(idx.back() == T - 1);
    for (std::size_t i = 1; i < idx.size(); ++i) {
      CHECK(idx[i] > idx[i - 1]);
      CHECK(idx[i] < T);
    }
  }
}

TEST_CASE("identity downsampling when M = 1 and importance is zero") {
  Trajectory traj = velocity_trajectory(std::vector<double>(30, 0.0));
  SampleConfig sample{50.0, 50.0};
  Trajectory out = downsample_trajectory(traj, SpamConfig{}, FilterConfig{}, sample);
  CHECK(out.frames == traj.frames);
  CHECK(out.id == "synthetic#ds");
  CHECK(out.fs_hz == traj.fs_hz);
}

TEST_CASE("two-phase trajectory: slow phase kept at least 3x denser") {
  // Fast transit for 200 frames, slow fine motion for 100. The gripper
  // carries load during transit so both channels peak there.
  std::vector<double> profile(300);
  for (std::size_t i = 0; i < 200; ++i) profile[i] = 1.0;
  for (std::size_t i = 200; i < 300; ++i) profile[i] = 0.05;
  Trajectory traj = velocity_trajectory(profile);
  for (std::size_t i = 0; i < 200; ++i) traj.frames[i].state.eeft = {10.0};
  SampleConfig sample{50.0, 10.0};  // M = 5
  Trajectory out = downsample_trajectory(traj, SpamConfig{}, FilterConfig{}, sample);

  std::size_t fast_kept = 0, slow_kept = 0;
  for (const Frame& fr : out.frames) (fr.t < 200 ? fast_kept : slow_kept)++;
  const double fast_density = static_cast<double>(fast_kept) / 200.0;
  const double slow_density = static_cast<double>(slow_kept) / 100.0;
  CHECK(slow_density >= 3.0 * fast_density);
  CHECK(out.frames.size() <= traj.frames.size());
  CHECK(out.frames.front().t == 0);
  CHECK(out.frames.back().t == 299);
}

TEST_CASE("downsample_dataset: empty errors, N=1 modes agree, parallel matches serial") {
  Dataset empty;
  CHECK_THROWS(downsample_dataset(empty, SpamConfig{}, FilterConfig{}, SampleConfig{}));

  Rng rng(31);
  Dataset ds;
  for (int n = 0; n < 6; ++n) {
    std::vector<double> profile(80 + 10 * n);
    for (double& v : profile) v = rng.uniform(0, 1);
    Trajectory traj = velocity_trajectory(profile);
    traj.id = "demo-" + std::to_string(n);
    ds.trajectories.push_back(traj);
  }

  Dataset serial =
      downsample_dataset(ds, SpamConfig{}, FilterConfig{}, SampleConfig{}, ParallelMode::Serial);
  Dataset parallel =
      downsample_dataset(ds, SpamConfig{}, FilterConfig{}, SampleConfig{}, ParallelMode::OpenMp);
  CHECK(serial == parallel);

  Dataset one;
  one.trajectories = {ds.trajectories[0]};
  SpamConfig aligned;
  aligned.aggregation = AggregationMode::AlignedMean;
  Dataset a = downsample_dataset(one, SpamConfig{}, FilterConfig{}, SampleConfig{});
  Dataset b = downsample_dataset(one, aligned, FilterConfig{}, SampleConfig{});
  CHECK(a.trajectories == b.trajectories);
}

TEST_CASE("downsample is deterministic and reports account for every transition") {
  Rng rng(41);
  Dataset ds;
  for (int n = 0; n < 3; ++n) {
    std::vector<double> profile(120);
    for (double& v : profile) v = rng.uniform(0, 2);
    Trajectory traj = velocity_trajectory(profile);
    traj.id = "demo-" + std::to_string(n);
    ds.trajectories.push_back(traj);
  }
  DownsampleReport r1, r2;
  Dataset d1 = downsample_dataset(ds, SpamConfig{}, FilterConfig{}, SampleConfig{},
                                  ParallelMode::OpenMp, &r1);
  Dataset d2 = downsample_dataset(ds, SpamConfig{}, FilterConfig{}, SampleConfig{},
                                  ParallelMode::OpenMp, &r2);
  CHECK(d1 == d2);

  std::int64_t hist_total = 0;
  for (const auto& [gap, count] : r1.stride_histogram) hist_total += count;
  std::int64_t transitions = 0;
  for (const auto& st : r1.per_trajectory)
    transitions += static_cast<std::int64_t>(st.retained_frames) - 1;
  CHECK(hist_total == transitions);
  CHECK(r1.total_retained <= r1.total_original);
}

TEST_CASE("filtered importance of a constant raw series equals that constant") {
  std::vector<double> profile(100);
  for (std::size_t i = 0; i < profile.size(); ++i) profile[i] = (i % 2 == 0) ? 0.4 : -0.4;
  Trajectory traj = velocity_trajectory(profile);
  // |qvel| is constant 0.4 -> min-max collapses it to zeros; use the raw
  // series directly through the filter instead for the DC property.
  SpamConfig cfg;
  auto imp = compute_importance({&traj}, cfg, FilterConfig{}, 50.0);
  for (double v : imp.filtered) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));
}

}  // TEST_SUITE
