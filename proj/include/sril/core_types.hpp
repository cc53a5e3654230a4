#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sril {

/// Proprioceptive sample: joint positions/velocities plus one
/// end-effector force/torque proxy per gripper.
struct SensoryState {
  std::vector<double> qpos;  // radians, length J
  std::vector<double> qvel;  // radians/s, length J
  std::vector<double> eeft;  // N or N*m, length G

  bool operator==(const SensoryState&) const = default;
};

/// Control command: target joint positions and velocities.
struct Action {
  std::vector<double> target_pos;  // radians, length J
  std::vector<double> target_vel;  // radians/s, length J

  bool operator==(const Action&) const = default;
};

/// Named slice of the flat observation feature vector.
struct LayoutField {
  std::string name;
  int offset = 0;
  int length = 0;

  bool operator==(const LayoutField&) const = default;
};

/// Low-dimensional state features (object positions, goals, held flags).
/// The field layout lives on the trajectory; it is identical for every
/// frame of a dataset.
struct Observation {
  std::vector<double> features;

  bool operator==(const Observation&) const = default;
};

struct Frame {
  std::int64_t t = 0;  // timestep index in the original dense recording
  Observation obs;
  SensoryState state;
  Action action;

  bool operator==(const Frame&) const = default;
};

struct Trajectory {
  std::string id;
  double fs_hz = 0.0;  // sampling frequency the frames were recorded at
  std::vector<LayoutField> layout;
  std::vector<Frame> frames;

  bool operator==(const Trajectory&) const = default;
};

struct Dataset {
  std::vector<Trajectory> trajectories;
  std::map<std::string, std::string> meta;  // provenance: seeds, task, parameters

  bool operator==(const Dataset&) const = default;
};

/// Per-joint mean and population standard deviation of action target
/// positions over a dataset. Frozen at training time and reused as the
/// normalization constants of the executor's disagreement metric.
struct ActionStats {
  std::vector<double> mu;
  std::vector<double> sigma;

  bool operator==(const ActionStats&) const = default;
};

/// Checks every trajectory invariant and reports violations as strings
/// naming the frame index and field. Empty result means the trajectory is
/// well formed. Never throws.
std::vector<std::string> validate_trajectory(const Trajectory& traj);

/// Joint dimension J of a trajectory (0 for empty trajectories).
std::size_t joint_dim(const Trajectory& traj);
/// Gripper/eeft dimension G of a trajectory (0 for empty trajectories).
std::size_t gripper_dim(const Trajectory& traj);

/// Pooled per-joint mean and population std of action.target_pos over
/// every frame of every trajectory. Throws on an empty dataset.
ActionStats compute_action_stats(const Dataset& ds);

}  // namespace sril
