#pragma once

#include <cstdint>
#include <vector>

#include "sril/core_types.hpp"
#include "sril/policy.hpp"
#include "sril/rng.hpp"
#include "sril/simenv.hpp"

namespace sril {

/// Joint-space trapezoid profile. Every joint that still has distance to
/// cover runs at exactly w_fast (cruise) until the arm is within
/// approach_radius of its stage target in joint space, then crawls at
/// w_approach. Moving joints therefore sit at their peak speed through
/// whole transit legs, which is what gives demos their cleanly bimodal
/// velocity structure.
struct ExpertConfig {
  double w_fast = 0.35;          // cruise joint speed, rad/s
  double w_approach = 0.055;     // terminal crawl joint speed, rad/s
  double approach_radius = 0.16; // crawl inside this joint-space distance, rad
  double blend_gain = 5.0;       // 1/s, cruise-to-crawl ramp slope
  /// Additive zero-mean noise on chunk target positions (rad). Used to
  /// create controlled prediction disagreement in executor tests; demos
  /// are generated noise-free.
  double noise_std = 0.0;
  std::uint64_t noise_seed = 0;
};

/// Frame labels emitted by the demo generator. The blend between cruise
/// and crawl, and frames spent driving a gripper, belong to neither of
/// the two canonical phases.
enum class DemoPhase { Transit, Approach, Blend, Actuate };

struct ExpertDecision {
  Action action;
  double profile_speed = 0.0;   // largest commanded end-effector speed
  bool gripper_active = false;  // some gripper is being driven
};

/// Waypoint-following controller for the simenv tasks. The control law is
/// a pure function of the world state, so a frame's (observation, state)
/// pair fully determines its action - which is what makes the tasks
/// learnable by a feedforward chunk regressor.
class ScriptedExpert final : public PolicyOracle {
 public:
  ScriptedExpert(TaskSpec task, SimParams params, std::size_t chunk_len,
                 ExpertConfig cfg = {});

  ExpertDecision decide(const WorldState& world) const;

  std::size_t chunk_length() const override { return chunk_len_; }
  std::size_t joint_dimension() const override { return kJointDim; }

  /// Reconstructs the world from the observation contract and rolls the
  /// controller forward chunk_length steps. With noise_std > 0 each call
  /// additionally draws fresh chunk noise from the seeded stream.
  ActionChunk predict_chunk(const PolicyInput& input, std::int64_t t) const override;

 private:
  TaskSpec task_;
  SimParams params_;
  std::size_t chunk_len_;
  ExpertConfig cfg_;
  mutable Rng noise_rng_;
};

struct DemoResult {
  Trajectory trajectory;
  std::vector<DemoPhase> phases;  // one label per frame
};

/// Runs the scripted expert to task success, recording frames at
/// params.fs_hz plus a short hold tail. Deterministic per seed; throws if
/// the expert fails to reach success within the step limit.
DemoResult generate_demo(const TaskSpec& task, const SimParams& params, std::uint64_t seed,
                         const ExpertConfig& cfg = {});

/// n demos with seeds base_seed .. base_seed+n-1, with provenance meta.
Dataset generate_demo_dataset(const TaskSpec& task, const SimParams& params, int n,
                              std::uint64_t base_seed, const ExpertConfig& cfg = {});

}  // namespace sril
