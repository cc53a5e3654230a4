#include "sril/simenv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sril/rng.hpp"

namespace sril {

double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

Vec2 forward_kinematics(const ArmModel& arm, double q0, double q1) {
  if (q0 < arm.joint_lo || q0 > arm.joint_hi || q1 < arm.joint_lo || q1 > arm.joint_hi)
    throw std::out_of_range("forward_kinematics: joint angle outside limits");
  return {arm.base.x + arm.l1 * std::cos(q0) + arm.l2 * std::cos(q0 + q1),
          arm.base.y + arm.l1 * std::sin(q0) + arm.l2 * std::sin(q0 + q1)};
}

std::optional<std::array<double, 2>> inverse_kinematics(const ArmModel& arm,
                                                        const Vec2& target) {
  const Vec2 d = target - arm.base;
  const double r = norm(d);
  const double reach_max = arm.l1 + arm.l2;
  const double reach_min = std::abs(arm.l1 - arm.l2);
  if (r > reach_max + 1e-12 || r < reach_min - 1e-12) return std::nullopt;

  double cos_q1 = (r * r - arm.l1 * arm.l1 - arm.l2 * arm.l2) / (2.0 * arm.l1 * arm.l2);
  cos_q1 = std::clamp(cos_q1, -1.0, 1.0);
  const double q1 = std::acos(cos_q1);  // elbow-down branch
  double q0 =
      std::atan2(d.y, d.x) - std::atan2(arm.l2 * std::sin(q1), arm.l1 + arm.l2 * std::cos(q1));
  constexpr double two_pi = 2.0 * 3.14159265358979323846;
  while (q0 > 3.14159265358979323846) q0 -= two_pi;
  while (q0 < -3.14159265358979323846) q0 += two_pi;
  return std::array<double, 2>{q0, q1};
}

TaskName parse_task_name(const std::string& name) {
  if (name == "cube_transfer") return TaskName::CubeTransfer;
  if (name == "bimanual_restore") return TaskName::BimanualRestore;
  throw std::runtime_error("unknown task '" + name +
                           "' (expected cube_transfer or bimanual_restore)");
}

std::string task_name_string(TaskName name) {
  return name == TaskName::CubeTransfer ? "cube_transfer" : "bimanual_restore";
}

TaskSpec TaskSpec::make(TaskName name) {
  TaskSpec task;
  task.name = name;
  return task;
}

SimParams SimParams::defaults() {
  SimParams p;
  p.right.base = {0.40, 0.0};
  p.left.base = {-0.40, 0.0};
  return p;
}

const ArmModel& arm_model(const SimParams& params, std::size_t arm) {
  return arm == 0 ? params.right : params.left;
}

Vec2 end_effector(const WorldState& world, const SimParams& params, std::size_t arm) {
  const ArmModel& model = arm_model(params, arm);
  return forward_kinematics(model, world.qpos[3 * arm], world.qpos[3 * arm + 1]);
}

double gripper_value(const WorldState& world, std::size_t arm) {
  return world.qpos[3 * arm + 2];
}

namespace {

int holding(const WorldState& world, std::size_t arm) {
  for (std::size_t i = 0; i < world.holder.size(); ++i)
    if (world.holder[i] == static_cast<int>(arm)) return static_cast<int>(i);
  return -1;
}

std::size_t object_count(TaskName name) { return name == TaskName::CubeTransfer ? 1 : 2; }

}  // namespace

std::array<double, 2> rest_pose(const TaskSpec& task, const SimParams& params,
                                std::size_t arm) {
  const ArmModel& model = arm_model(params, arm);
  const Vec2 anchor = arm == 0 ? task.cube_start
                               : (task.name == TaskName::CubeTransfer ? task.handoff
                                                                      : task.box_start);
  const auto grasp = inverse_kinematics(model, anchor);
  if (!grasp) throw std::runtime_error("rest_pose: nominal anchor unreachable");
  // Offsets chosen so both fetch and retreat legs swing shoulder and
  // elbow through comparable angles.
  if (arm == 0) return {(*grasp)[0] - 0.70, (*grasp)[1] - 0.90};
  if (task.name == TaskName::CubeTransfer) return {(*grasp)[0] + 0.70, (*grasp)[1] + 0.55};
  return {(*grasp)[0] + 0.70, (*grasp)[1] - 0.70};
}

WorldState env_step(const WorldState& world, const Action& action, const TaskSpec& task,
                    const SimParams& params) {
  if (action.target_pos.size() != kJointDim || action.target_vel.size() != kJointDim)
    throw std::runtime_error("env_step: action dimension " +
                             std::to_string(action.target_pos.size()) + " does not match J " +
                             std::to_string(kJointDim));

  WorldState next = world;
  const double dt = params.dt();

  for (std::size_t arm = 0; arm < kArmCount; ++arm) {
    const ArmModel& model = arm_model(params, arm);
    for (std::size_t j = 0; j < 2; ++j) {
      const std::size_t idx = 3 * arm + j;
      const double limit = model.joint_vmax * dt;
      const double delta = std::clamp(action.target_pos[idx] - world.qpos[idx], -limit, limit);
      next.qpos[idx] = std::clamp(world.qpos[idx] + delta, model.joint_lo, model.joint_hi);
    }
    const std::size_t gidx = 3 * arm + 2;
    const double glimit = model.gripper_vmax * dt;
    const double gdelta = std::clamp(action.target_pos[gidx] - world.qpos[gidx], -glimit, glimit);
    next.qpos[gidx] = std::clamp(world.qpos[gidx] + gdelta, 0.0, 1.0);
  }
  for (std::size_t i = 0; i < kJointDim; ++i)
    next.qvel[i] = (next.qpos[i] - world.qpos[i]) / dt;
  next.tick = world.tick + 1;

  // Held objects ride on their holder's end effector.
  for (std::size_t obj = 0; obj < next.objects.size(); ++obj)
    if (next.holder[obj] >= 0)
      next.objects[obj] = end_effector(next, params, static_cast<std::size_t>(next.holder[obj]));

  // Release: an open gripper drops its object where it is. A cube dropped
  // into the box keeps riding with the box.
  for (std::size_t arm = 0; arm < kArmCount; ++arm) {
    const int obj = holding(next, arm);
    if (obj >= 0 && gripper_value(next, arm) < 0.5) {
      next.holder[obj] = -1;
      if (task.name == TaskName::BimanualRestore && obj == 0 && next.objects.size() > 1 &&
          distance(next.objects[0], next.objects[1]) <= task.contain_radius)
        next.contained_in[0] = 1;
    }
  }

  // Grasp: a closed gripper within reach of a free object picks it up.
  for (std::size_t arm = 0; arm < kArmCount; ++arm) {
    if (holding(next, arm) >= 0 || gripper_value(next, arm) < 0.5) continue;
    const Vec2 ee = end_effector(next, params, arm);
    for (std::size_t obj = 0; obj < next.objects.size(); ++obj) {
      if (next.holder[obj] != -1 || next.contained_in[obj] != -1) continue;
      if (distance(ee, next.objects[obj]) <= params.grasp_radius) {
        next.holder[obj] = static_cast<int>(arm);
        next.objects[obj] = ee;
        break;
      }
    }
  }

  // Contained objects follow their container.
  for (std::size_t obj = 0; obj < next.objects.size(); ++obj)
    if (next.contained_in[obj] >= 0)
      next.objects[obj] = next.objects[static_cast<std::size_t>(next.contained_in[obj])];

  return next;
}

bool Scoreboard::success() const {
  for (const auto& [name, achieved] : flags)
    if (!achieved) return false;
  return !flags.empty();
}

bool Scoreboard::flag(const std::string& name) const {
  for (const auto& [n, achieved] : flags)
    if (n == name) return achieved;
  return false;
}

Scoreboard Scoreboard::make(const TaskSpec& task) {
  Scoreboard sb;
  if (task.name == TaskName::CubeTransfer) {
    sb.flags = {{"grasp", false}, {"lift", false}, {"transfer", false}, {"place", false}};
  } else {
    sb.flags = {{"pick_cube", false}, {"pick_box", false}, {"restore", false}, {"home", false}};
  }
  return sb;
}

void Scoreboard::update(const WorldState& world, const TaskSpec& task, const SimParams& params) {
  auto set = [&](const std::string& name, bool cond) {
    for (auto& [n, achieved] : flags)
      if (n == name) achieved = achieved || cond;
  };
  if (task.name == TaskName::CubeTransfer) {
    const Vec2& cube = world.objects[0];
    set("grasp", world.holder[0] == 0);
    set("lift", world.holder[0] >= 0 && cube.y >= params.lift_height);
    set("transfer", world.holder[0] == 1);
    set("place", flag("transfer") && world.holder[0] == -1 &&
                     distance(cube, task.goal) <= task.epsilon);
  } else {
    const Vec2& cube = world.objects[0];
    const Vec2& box = world.objects[1];
    set("pick_cube", world.holder[0] == 0);
    set("pick_box", world.holder[1] == 1);
    set("restore", flag("pick_cube") && flag("pick_box") && world.holder[0] == -1 &&
                       distance(cube, box) <= task.contain_radius);
    set("home", flag("restore") && world.holder[1] == -1 &&
                    distance(box, world.object_homes[1]) <= task.epsilon);
  }
}

std::vector<LayoutField> task_layout(TaskName name) {
  if (name == TaskName::CubeTransfer)
    return {{"cube_pos", 0, 2}, {"goal_pos", 2, 2}, {"held", 4, 2}};
  return {{"cube_pos", 0, 2},
          {"box_pos", 2, 2},
          {"box_home", 4, 2},
          {"cube_held", 6, 2},
          {"box_held", 8, 2}};
}

SimEnv::SimEnv(TaskSpec task, SimParams params)
    : task_(std::move(task)), params_(std::move(params)), score_(Scoreboard::make(task_)) {
  reset(0);
}

void SimEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  world_ = WorldState{};
  world_.qpos.assign(kJointDim, 0.0);
  world_.qvel.assign(kJointDim, 0.0);

  for (std::size_t arm = 0; arm < kArmCount; ++arm) {
    const auto q = rest_pose(task_, params_, arm);
    world_.qpos[3 * arm] = q[0];
    world_.qpos[3 * arm + 1] = q[1];
    world_.qpos[3 * arm + 2] = 0.0;
  }

  const std::size_t n_obj = object_count(task_.name);
  const double he = task_.random_half_extent;
  for (std::size_t obj = 0; obj < n_obj; ++obj) {
    const Vec2 center = obj == 0 ? task_.cube_start : task_.box_start;
    const Vec2 pos{center.x + rng.uniform(-he, he), center.y + rng.uniform(-he, he)};
    world_.objects.push_back(pos);
    world_.object_homes.push_back(pos);
    world_.holder.push_back(-1);
    world_.contained_in.push_back(-1);
  }
  score_ = Scoreboard::make(task_);
}

void SimEnv::step(const Action& action) {
  world_ = env_step(world_, action, task_, params_);
  score_.update(world_, task_, params_);
}

Observation SimEnv::observation() const {
  Observation obs;
  const WorldState& w = world_;
  if (task_.name == TaskName::CubeTransfer) {
    obs.features = {w.objects[0].x,
                    w.objects[0].y,
                    task_.goal.x,
                    task_.goal.y,
                    w.holder[0] == 0 ? 1.0 : 0.0,
                    w.holder[0] == 1 ? 1.0 : 0.0};
  } else {
    obs.features = {w.objects[0].x,
                    w.objects[0].y,
                    w.objects[1].x,
                    w.objects[1].y,
                    w.object_homes[1].x,
                    w.object_homes[1].y,
                    w.holder[0] == 0 ? 1.0 : 0.0,
                    w.holder[0] == 1 ? 1.0 : 0.0,
                    w.holder[1] == 0 ? 1.0 : 0.0,
                    w.holder[1] == 1 ? 1.0 : 0.0};
  }
  return obs;
}

SensoryState SimEnv::sensory_state() const {
  SensoryState s;
  s.qpos = world_.qpos;
  s.qvel = world_.qvel;
  s.eeft.assign(kEeftDim, 0.0);
  for (std::size_t arm = 0; arm < kArmCount; ++arm)
    if (holding(world_, arm) >= 0)
      s.eeft[arm] = params_.eeft_hold_force * gripper_value(world_, arm);
  return s;
}

WorldState world_from_observation(const Observation& obs, const SensoryState& state,
                                  const TaskSpec& task) {
  WorldState w;
  w.qpos = state.qpos;
  w.qvel = state.qvel;
  const auto& f = obs.features;
  auto held_to_holder = [](double right, double left) {
    if (right > 0.5) return 0;
    if (left > 0.5) return 1;
    return -1;
  };
  if (task.name == TaskName::CubeTransfer) {
    if (f.size() != 6) throw std::runtime_error("world_from_observation: expected 6 features");
    w.objects = {{f[0], f[1]}};
    w.object_homes = {{f[0], f[1]}};
    w.holder = {held_to_holder(f[4], f[5])};
    w.contained_in = {-1};
  } else {
    if (f.size() != 10) throw std::runtime_error("world_from_observation: expected 10 features");
    w.objects = {{f[0], f[1]}, {f[2], f[3]}};
    w.object_homes = {{f[0], f[1]}, {f[4], f[5]}};
    w.holder = {held_to_holder(f[6], f[7]), held_to_holder(f[8], f[9])};
    w.contained_in = {-1, -1};
    if (w.holder[0] == -1 && distance(w.objects[0], w.objects[1]) <= task.contain_radius)
      w.contained_in[0] = 1;
  }
  return w;
}

void apply_env_config(const std::string& path, TaskSpec& task, SimParams& params) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open env config '" + path + "'");

  const std::map<std::string, std::function<void(double)>> setters = {
      {"fs_hz", [&](double v) { params.fs_hz = v; }},
      {"grasp_radius", [&](double v) { params.grasp_radius = v; }},
      {"lift_height", [&](double v) { params.lift_height = v; }},
      {"eeft_hold_force", [&](double v) { params.eeft_hold_force = v; }},
      {"joint_vmax", [&](double v) { params.right.joint_vmax = params.left.joint_vmax = v; }},
      {"gripper_vmax",
       [&](double v) { params.right.gripper_vmax = params.left.gripper_vmax = v; }},
      {"link1", [&](double v) { params.right.l1 = params.left.l1 = v; }},
      {"link2", [&](double v) { params.right.l2 = params.left.l2 = v; }},
      {"base_x", [&](double v) { params.right.base.x = v; params.left.base.x = -v; }},
      {"epsilon", [&](double v) { task.epsilon = v; }},
      {"step_limit", [&](double v) { task.step_limit = static_cast<int>(v); }},
      {"random_half_extent", [&](double v) { task.random_half_extent = v; }},
      {"contain_radius", [&](double v) { task.contain_radius = v; }},
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string key, eq, value;
    std::istringstream row(line);
    if (!(row >> key)) continue;
    if (!(row >> eq >> value) || eq != "=")
      throw std::runtime_error("env config line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    const auto it = setters.find(key);
    if (it == setters.end())
      throw std::runtime_error("env config line " + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    it->second(std::stod(value));
  }
}

}  // namespace sril
