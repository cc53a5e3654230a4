#include "sril/expert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sril {

namespace {

struct ArmPlan {
  Vec2 target;        // end-effector goal point of the current stage
  double grip = 0.0;  // commanded gripper value (0 open, 1 closed)
  bool precise = true;  // precise stages crawl in; staging legs land at cruise
  bool is_pose = false;
  std::array<double, 2> pose{0.0, 0.0};  // joint-space goal when is_pose

  ArmPlan() = default;
  ArmPlan(Vec2 t, double g, bool prec = true) : target(t), grip(g), precise(prec) {}
  ArmPlan(const std::array<double, 2>& q, double g, bool prec = true)
      : grip(g), precise(prec), is_pose(true), pose(q) {}
};

constexpr double kTransitSpeedFrac = 0.85;   // label: cruise plateau only
constexpr double kApproachSpeedFrac = 0.30;  // label: crawl, dwell, idle
constexpr double kHandoffTol = 0.012;
constexpr int kHoldTail = 15;

Vec2 clamp_reachable(const ArmModel& arm, Vec2 target) {
  const Vec2 d = target - arm.base;
  const double r = norm(d);
  const double hi = (arm.l1 + arm.l2) * 0.999;
  const double lo = std::abs(arm.l1 - arm.l2) * 1.001;
  if (r < 1e-12) return {arm.base.x + lo, arm.base.y};
  const double clamped = std::clamp(r, lo, hi);
  return arm.base + d * (clamped / r);
}

}  // namespace

ScriptedExpert::ScriptedExpert(TaskSpec task, SimParams params, std::size_t chunk_len,
                               ExpertConfig cfg)
    : task_(std::move(task)),
      params_(std::move(params)),
      chunk_len_(chunk_len),
      cfg_(cfg),
      noise_rng_(cfg.noise_seed) {
  if (chunk_len_ == 0) throw std::runtime_error("scripted expert: chunk length must be > 0");
}

ExpertDecision ScriptedExpert::decide(const WorldState& world) const {
  const double gr = params_.grasp_radius;
  const double close_dist = 0.55 * gr;
  std::array<ArmPlan, 2> plan;
  const Vec2 right_ee = end_effector(world, params_, 0);
  const Vec2 left_ee = end_effector(world, params_, 1);

  if (task_.name == TaskName::CubeTransfer) {
    const Vec2& cube = world.objects[0];
    const int h = world.holder[0];
    if (h == -1) {
      if (distance(cube, task_.goal) <= 0.9 * task_.epsilon) {
        // Delivered: hold in place with open grippers.
        plan[0] = {right_ee, 0.0};
        plan[1] = {left_ee, 0.0};
      } else if (distance(left_ee, cube) <= gr && distance(cube, task_.handoff) <= 0.06) {
        // Mid-handoff: the cube floats free for a moment while ownership
        // changes hands.
        plan[0] = {rest_pose(task_, params_, 0), 0.0, false};
        plan[1] = {cube, 1.0};
      } else {
        // Fetch: right goes for the cube, left pre-positions at the
        // handoff so both arms cruise together.
        plan[0] = {cube, distance(right_ee, cube) <= close_dist ? 1.0 : 0.0};
        plan[1] = {task_.handoff + Vec2{-0.06, 0.02}, 0.0, false};
      }
    } else if (h == 0) {
      if (distance(cube, task_.handoff) > kHandoffTol) {
        // Carry to the handoff; the left arm times its final approach to
        // arrive with the cube.
        plan[0] = {task_.handoff, 1.0};
        const bool cube_near = distance(cube, task_.handoff) <= 0.10;
        plan[1] = {cube_near ? cube : task_.handoff + Vec2{-0.06, 0.02}, 0.0, cube_near};
      } else {
        // Handoff dwell: left closes on the cube, right lets go once the
        // left gripper has taken over.
        const bool left_ready =
            gripper_value(world, 1) >= 0.6 && distance(left_ee, cube) <= gr;
        plan[0] = {task_.handoff, left_ready ? 0.0 : 1.0};
        plan[1] = {cube, 1.0};
      }
    } else {
      // Left carries to the goal; right retreats home in parallel.
      plan[0] = {rest_pose(task_, params_, 0), 0.0, false};
      plan[1] = {task_.goal, distance(cube, task_.goal) <= 0.5 * task_.epsilon ? 0.0 : 1.0};
    }
  } else {
    const Vec2& cube = world.objects[0];
    const Vec2& box = world.objects[1];
    const Vec2& box_home = world.object_homes[1];
    const int hc = world.holder[0];
    const int hb = world.holder[1];
    const bool contained = world.contained_in[0] == 1;

    // Left arm owns the box.
    if (hb == 1) {
      if (!contained) {
        plan[1] = {task_.meet_point, 1.0, false};
      } else {
        plan[1] = {box_home,
                   distance(box, box_home) <= 0.6 * task_.epsilon ? 0.0 : 1.0};
      }
    } else if (contained && distance(box, box_home) <= 0.8 * task_.epsilon) {
      plan[1] = {left_ee, 0.0};  // done
    } else {
      plan[1] = {box, distance(left_ee, box) <= close_dist ? 1.0 : 0.0};
    }

    // Right arm owns the cube.
    if (hc == 0) {
      const bool box_ready = hb == 1 && distance(box, task_.meet_point) <= 0.05;
      if (!box_ready) {
        // Stage just beside the meet point so the insertion leg is short:
        // the filter then sees carry, insert and return as one sustained
        // high-activity block.
        plan[0] = {task_.meet_point + Vec2{0.035, -0.005}, 1.0, false};
      } else {
        plan[0] = {box, distance(cube, box) <= 0.6 * task_.contain_radius ? 0.0 : 1.0};
      }
    } else if (contained) {
      plan[0] = {rest_pose(task_, params_, 0), 0.0, false};
    } else {
      plan[0] = {cube, distance(right_ee, cube) <= close_dist ? 1.0 : 0.0};
    }
  }

  ExpertDecision out;
  out.action.target_pos.assign(kJointDim, 0.0);
  out.action.target_vel.assign(kJointDim, 0.0);
  const double dt = params_.dt();
  for (std::size_t arm = 0; arm < kArmCount; ++arm) {
    const ArmModel& model = arm_model(params_, arm);
    const std::size_t base = 3 * arm;
    std::optional<std::array<double, 2>> q_goal;
    if (plan[arm].is_pose) {
      q_goal = plan[arm].pose;
    } else {
      q_goal = inverse_kinematics(model, clamp_reachable(model, plan[arm].target));
    }
    double dq0 = 0.0, dq1 = 0.0;
    if (q_goal) {
      dq0 = std::clamp((*q_goal)[0], model.joint_lo, model.joint_hi) - world.qpos[base];
      dq1 = std::clamp((*q_goal)[1], model.joint_lo, model.joint_hi) - world.qpos[base + 1];
    }
    // Bang-bang per joint: every joint still in motion runs at the full
    // profile speed, so moving joints spend whole legs at their peak.
    // Staging legs skip the terminal crawl and land at cruise speed.
    const double remaining = std::max(std::abs(dq0), std::abs(dq1));
    const double w = plan[arm].precise
                         ? std::clamp(cfg_.w_approach + cfg_.blend_gain *
                                          (remaining - cfg_.approach_radius),
                                      cfg_.w_approach, cfg_.w_fast)
                         : cfg_.w_fast;
    const double step0 = std::clamp(dq0, -w * dt, w * dt);
    const double step1 = std::clamp(dq1, -w * dt, w * dt);
    out.action.target_pos[base] = world.qpos[base] + step0;
    out.action.target_pos[base + 1] = world.qpos[base + 1] + step1;
    out.action.target_vel[base] = step0 / dt;
    out.action.target_vel[base + 1] = step1 / dt;
    out.action.target_pos[base + 2] = plan[arm].grip;
    out.action.target_vel[base + 2] = 0.0;
    out.profile_speed =
        std::max({out.profile_speed, std::abs(step0) / dt, std::abs(step1) / dt});
    out.gripper_active =
        out.gripper_active || std::abs(plan[arm].grip - gripper_value(world, arm)) > 0.25;
  }
  return out;
}

ActionChunk ScriptedExpert::predict_chunk(const PolicyInput& input, std::int64_t t) const {
  if (input.state.qpos.size() != kJointDim)
    throw std::runtime_error("scripted expert: expected J=" + std::to_string(kJointDim) +
                             ", got " + std::to_string(input.state.qpos.size()));
  WorldState w = world_from_observation(input.obs, input.state, task_);
  ActionChunk chunk;
  chunk.issued_at = t;
  chunk.actions.reserve(chunk_len_);
  for (std::size_t k = 0; k < chunk_len_; ++k) {
    ExpertDecision d = decide(w);
    w = env_step(w, d.action, task_, params_);
    chunk.actions.push_back(std::move(d.action));
  }
  if (cfg_.noise_std > 0.0) {
    for (Action& a : chunk.actions)
      for (double& v : a.target_pos) v += noise_rng_.gaussian(0.0, cfg_.noise_std);
  }
  return chunk;
}

DemoResult generate_demo(const TaskSpec& task, const SimParams& params, std::uint64_t seed,
                         const ExpertConfig& cfg) {
  SimEnv env(task, params);
  env.reset(seed);
  ScriptedExpert expert(task, params, 1, cfg);

  DemoResult result;
  Trajectory& traj = result.trajectory;
  traj.id = "demo-" + std::to_string(seed);
  traj.fs_hz = params.fs_hz;
  traj.layout = env.layout();

  int tail = -1;
  for (int tick = 0; tick < task.step_limit + kHoldTail; ++tick) {
    const ExpertDecision d = expert.decide(env.world());

    Frame fr;
    fr.t = tick;
    fr.obs = env.observation();
    fr.state = env.sensory_state();
    fr.action = d.action;
    traj.frames.push_back(std::move(fr));

    DemoPhase phase = DemoPhase::Blend;
    if (d.gripper_active) {
      phase = DemoPhase::Actuate;
    } else if (d.profile_speed >= kTransitSpeedFrac * cfg.w_fast) {
      phase = DemoPhase::Transit;
    } else if (d.profile_speed <= kApproachSpeedFrac * cfg.w_fast) {
      phase = DemoPhase::Approach;
    }
    result.phases.push_back(phase);

    env.step(d.action);
    if (tail < 0 && env.score().success()) tail = kHoldTail;
    if (tail == 0) break;
    if (tail > 0) --tail;
  }
  if (!env.score().success())
    throw std::runtime_error("scripted expert failed on task " + task_name_string(task.name) +
                             " seed " + std::to_string(seed) + " within " +
                             std::to_string(task.step_limit) + " steps");
  return result;
}

Dataset generate_demo_dataset(const TaskSpec& task, const SimParams& params, int n,
                              std::uint64_t base_seed, const ExpertConfig& cfg) {
  if (n <= 0) throw std::runtime_error("generate_demo_dataset: n must be positive");
  Dataset ds;
  ds.meta["task"] = task_name_string(task.name);
  ds.meta["generator"] = "scripted_expert";
  ds.meta["base_seed"] = std::to_string(base_seed);
  ds.meta["demos"] = std::to_string(n);
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", params.fs_hz);
    ds.meta["fs_hz"] = buf;
  }
  for (int i = 0; i < n; ++i)
    ds.trajectories.push_back(generate_demo(task, params, base_seed + static_cast<std::uint64_t>(i), cfg).trajectory);
  return ds;
}

}  // namespace sril
