#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sril/core_types.hpp"

namespace sril {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;
};

double norm(const Vec2& v);
double distance(const Vec2& a, const Vec2& b);

/// Two-link planar arm. The gripper is a third, prismatic-style joint in
/// [0, 1] (0 open, 1 closed).
struct ArmModel {
  Vec2 base;
  double l1 = 0.30;  // m
  double l2 = 0.25;  // m
  double joint_lo = -3.14159265358979323846;
  double joint_hi = 3.14159265358979323846;
  double joint_vmax = 1.1;    // rad/s
  double gripper_vmax = 4.0;  // full-range fractions per second
};

/// Standard planar 2-link forward kinematics from the arm base.
/// Throws std::out_of_range when an angle violates the arm's limits.
Vec2 forward_kinematics(const ArmModel& arm, double q0, double q1);

/// Analytic 2-link inverse kinematics, elbow-down branch. Targets outside
/// the reachable annulus return nullopt rather than throwing.
std::optional<std::array<double, 2>> inverse_kinematics(const ArmModel& arm, const Vec2& target);

enum class TaskName { CubeTransfer, BimanualRestore };

TaskName parse_task_name(const std::string& name);
std::string task_name_string(TaskName name);

struct TaskSpec {
  TaskName name = TaskName::CubeTransfer;
  double epsilon = 0.02;          // success tolerance, m
  int step_limit = 2000;
  double random_half_extent = 0.05;  // 0.1 m square randomization box

  // Workspace anchors (vertical x/y plane, table at y = 0). Chosen so
  // that each travel leg sweeps both shoulder and elbow through
  // comparable angles, keeping every joint-velocity channel active for
  // whole legs.
  Vec2 cube_start{0.08, 0.12};
  Vec2 goal{-0.12, 0.14};
  Vec2 handoff{0.0, 0.26};
  Vec2 box_start{-0.08, 0.12};
  Vec2 meet_point{0.0, 0.30};  // where the box waits for the cube
  Vec2 right_home{0.24, 0.34};
  Vec2 left_home{-0.24, 0.34};
  double contain_radius = 0.03;  // cube dropped this close to the box rides along

  static TaskSpec make(TaskName name);
};

struct SimParams {
  double fs_hz = 50.0;
  ArmModel right;  // arm 0
  ArmModel left;   // arm 1
  double grasp_radius = 0.04;
  double lift_height = 0.10;
  double eeft_hold_force = 10.0;  // N at a fully closed gripper

  double dt() const { return 1.0 / fs_hz; }

  static SimParams defaults();
};

/// qpos layout: [right j0, right j1, right grip, left j0, left j1, left grip].
inline constexpr std::size_t kArmCount = 2;
inline constexpr std::size_t kJointDim = 6;
inline constexpr std::size_t kEeftDim = 2;

struct WorldState {
  std::vector<double> qpos;
  std::vector<double> qvel;
  std::vector<Vec2> objects;       // [cube] or [cube, box]
  std::vector<Vec2> object_homes;  // sampled start positions
  std::vector<int> holder;         // -1 free, 0 right arm, 1 left arm
  std::vector<int> contained_in;   // -1 or index of the container object
  std::int64_t tick = 0;
};

const ArmModel& arm_model(const SimParams& params, std::size_t arm);
Vec2 end_effector(const WorldState& world, const SimParams& params, std::size_t arm);
double gripper_value(const WorldState& world, std::size_t arm);

/// Rest (home) joint pose of an arm. Defined as a joint-space offset from
/// the arm's nominal grasp pose so that fetch and retreat legs sweep both
/// joints through comparable angles.
std::array<double, 2> rest_pose(const TaskSpec& task, const SimParams& params, std::size_t arm);

/// One rate-limited kinematic step: joints move toward targets, grasp and
/// release are processed, attached objects follow their holders.
/// Deterministic; throws on an action dimension mismatch.
WorldState env_step(const WorldState& world, const Action& action, const TaskSpec& task,
                    const SimParams& params);

/// Latched subgoal flags; success means all flags achieved.
struct Scoreboard {
  std::vector<std::pair<std::string, bool>> flags;

  bool success() const;
  bool flag(const std::string& name) const;
  void update(const WorldState& world, const TaskSpec& task, const SimParams& params);

  static Scoreboard make(const TaskSpec& task);
};

std::vector<LayoutField> task_layout(TaskName name);

/// Deterministic environment instance: world + latched score.
class SimEnv {
 public:
  SimEnv(TaskSpec task, SimParams params);

  /// Places objects inside the seeded randomization box and re-arms the
  /// score. The arms start at their home poses with open grippers.
  void reset(std::uint64_t seed);

  void step(const Action& action);

  const WorldState& world() const { return world_; }
  const Scoreboard& score() const { return score_; }
  const TaskSpec& task() const { return task_; }
  const SimParams& params() const { return params_; }

  Observation observation() const;
  SensoryState sensory_state() const;
  std::vector<LayoutField> layout() const { return task_layout(task_.name); }

 private:
  TaskSpec task_;
  SimParams params_;
  WorldState world_;
  Scoreboard score_;
};

/// Rebuilds a world from an observation + sensory state pair. The task
/// layouts are designed to make this exact, which lets the scripted
/// expert act through the same observation contract as a learned policy.
WorldState world_from_observation(const Observation& obs, const SensoryState& state,
                                  const TaskSpec& task);

/// Key=value environment overrides (one per line, '#' comments).
/// Recognised keys mirror the SimParams/TaskSpec fields.
void apply_env_config(const std::string& path, TaskSpec& task, SimParams& params);

}  // namespace sril
