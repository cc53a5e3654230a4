#include "sril/core_types.hpp"

#include <cmath>
#include <stdexcept>

namespace sril {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

std::size_t joint_dim(const Trajectory& traj) {
  return traj.frames.empty() ? 0 : traj.frames.front().state.qpos.size();
}

std::size_t gripper_dim(const Trajectory& traj) {
  return traj.frames.empty() ? 0 : traj.frames.front().state.eeft.size();
}

std::vector<std::string> validate_trajectory(const Trajectory& traj) {
  std::vector<std::string> violations;
  auto report = [&](const std::string& msg) { violations.push_back(msg); };

  if (traj.frames.empty()) {
    report("trajectory is empty");
    return violations;
  }
  if (!(traj.fs_hz > 0.0)) report("fs_hz must be > 0");

  int layout_total = 0;
  for (std::size_t i = 0; i < traj.layout.size(); ++i) {
    const LayoutField& f = traj.layout[i];
    if (f.offset != layout_total)
      report("layout field '" + f.name + "' offset " + std::to_string(f.offset) +
             " does not match running total " + std::to_string(layout_total));
    if (f.length <= 0) report("layout field '" + f.name + "' has non-positive length");
    layout_total += f.length;
  }

  const std::size_t J = traj.frames.front().state.qpos.size();
  const std::size_t G = traj.frames.front().state.eeft.size();
  if (J == 0) report("frame 0: qpos is empty (J must be > 0)");
  if (G == 0) report("frame 0: eeft is empty (G must be >= 1)");

  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    const Frame& fr = traj.frames[i];
    const std::string at = "frame " + std::to_string(i) + ": ";

    if (fr.t < 0) report(at + "negative t");
    if (i > 0 && fr.t <= traj.frames[i - 1].t)
      report(at + "non-increasing t at index " + std::to_string(i));

    if (fr.state.qvel.size() != fr.state.qpos.size())
      report(at + "qvel length mismatch (" + std::to_string(fr.state.qvel.size()) +
             " vs qpos " + std::to_string(fr.state.qpos.size()) + ")");
    if (fr.state.qpos.size() != J)
      report(at + "qpos length differs from frame 0");
    if (fr.state.eeft.size() != G)
      report(at + "eeft length differs from frame 0");
    if (fr.action.target_pos.size() != J)
      report(at + "action target_pos length mismatch (" +
             std::to_string(fr.action.target_pos.size()) + " vs J " + std::to_string(J) + ")");
    if (fr.action.target_vel.size() != J)
      report(at + "action target_vel length mismatch (" +
             std::to_string(fr.action.target_vel.size()) + " vs J " + std::to_string(J) + ")");
    if (static_cast<int>(fr.obs.features.size()) != layout_total)
      report(at + "obs features length " + std::to_string(fr.obs.features.size()) +
             " does not match layout total " + std::to_string(layout_total));

    if (!all_finite(fr.state.qpos)) report(at + "non-finite qpos");
    if (!all_finite(fr.state.qvel)) report(at + "non-finite qvel");
    if (!all_finite(fr.state.eeft)) report(at + "non-finite eeft");
    if (!all_finite(fr.action.target_pos)) report(at + "non-finite action target_pos");
    if (!all_finite(fr.action.target_vel)) report(at + "non-finite action target_vel");
    if (!all_finite(fr.obs.features)) report(at + "non-finite obs features");
  }
  return violations;
}

ActionStats compute_action_stats(const Dataset& ds) {
  if (ds.trajectories.empty()) throw std::runtime_error("compute_action_stats: empty dataset");
  const std::size_t J = joint_dim(ds.trajectories.front());
  if (J == 0) throw std::runtime_error("compute_action_stats: empty dataset");

  std::vector<double> sum(J, 0.0);
  std::size_t count = 0;
  for (const Trajectory& traj : ds.trajectories) {
    for (const Frame& fr : traj.frames) {
      if (fr.action.target_pos.size() != J)
        throw std::runtime_error("compute_action_stats: inconsistent joint dimension");
      for (std::size_t j = 0; j < J; ++j) sum[j] += fr.action.target_pos[j];
      ++count;
    }
  }
  if (count == 0) throw std::runtime_error("compute_action_stats: empty dataset");

  ActionStats stats;
  stats.mu.resize(J);
  for (std::size_t j = 0; j < J; ++j) stats.mu[j] = sum[j] / static_cast<double>(count);

  std::vector<double> sq(J, 0.0);
  for (const Trajectory& traj : ds.trajectories) {
    for (const Frame& fr : traj.frames) {
      for (std::size_t j = 0; j < J; ++j) {
        const double d = fr.action.target_pos[j] - stats.mu[j];
        sq[j] += d * d;
      }
    }
  }
  stats.sigma.resize(J);
  for (std::size_t j = 0; j < J; ++j)
    stats.sigma[j] = std::sqrt(sq[j] / static_cast<double>(count));
  return stats;
}

}  // namespace sril
