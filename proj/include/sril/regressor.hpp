#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sril/core_types.hpp"
#include "sril/parallel.hpp"
#include "sril/policy.hpp"

namespace sril {

/// Single-hidden-layer tanh regressor mapping (obs ⊕ qpos ⊕ qvel ⊕ eeft)
/// to a K-step action chunk (positions and velocities per step). Inputs
/// and outputs are standardized by training-set statistics; zero-sigma
/// components standardize to 0.
class RegressorModel final : public PolicyOracle {
 public:
  int obs_dim = 0;
  int J = 0;
  int G = 0;
  int K = 0;
  int hidden = 0;

  // Row-major weights: w1 is hidden x in_dim, w2 is out_dim x hidden.
  std::vector<double> w1, b1, w2, b2;
  std::vector<double> in_mu, in_sigma;    // length in_dim
  std::vector<double> out_mu, out_sigma;  // length out_dim
  /// Training-set action statistics, frozen for the executor's
  /// disagreement normalization.
  ActionStats action_stats;
  std::vector<LayoutField> layout;  // expected observation layout
  std::map<std::string, std::string> meta;

  int in_dim() const { return obs_dim + 2 * J + G; }
  int out_dim() const { return K * 2 * J; }

  std::size_t chunk_length() const override { return static_cast<std::size_t>(K); }
  std::size_t joint_dimension() const override { return static_cast<std::size_t>(J); }
  ActionChunk predict_chunk(const PolicyInput& input, std::int64_t t) const override;

  /// Raw forward pass on an already assembled input vector.
  std::vector<double> forward(const std::vector<double>& input) const;
};

/// Flattens a policy input in the regressor's layout: obs features, then
/// qpos, qvel, eeft.
std::vector<double> assemble_input(const PolicyInput& input);

/// Supervised pairs extracted from a dataset: one per frame, the target
/// being the next K actions (tail-padded by repeating the final action).
struct TrainingSet {
  int obs_dim = 0, J = 0, G = 0, K = 0;
  std::size_t count = 0;
  std::vector<double> inputs;   // count x in_dim, row-major
  std::vector<double> targets;  // count x out_dim, row-major
};

TrainingSet build_training_set(const Dataset& ds, int K);

enum class Optimizer { Sgd, Adam };

struct TrainOptions {
  int hidden = 96;
  int epochs = 60;
  int batch = 256;  // 0 = full batch
  int K = 100;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::Adam;
  ParallelMode mode = ParallelMode::OpenMp;
};

struct TrainResult {
  RegressorModel model;
  std::vector<double> loss_curve;  // mean training loss per epoch
};

/// Mini-batch gradient descent on the chunk MSE. Deterministic given the
/// seed and options regardless of thread count.
TrainResult train_regressor(const Dataset& ds, const TrainOptions& opts);

/// Batch loss and analytic gradients, exposed for the finite-difference
/// oracle. Gradient vectors are sized and overwritten. Both parallel
/// modes produce bitwise-identical results.
double loss_and_gradient(const RegressorModel& model, const std::vector<double>& inputs,
                         const std::vector<double>& targets, std::size_t count,
                         std::vector<double>& gw1, std::vector<double>& gb1,
                         std::vector<double>& gw2, std::vector<double>& gb2,
                         ParallelMode mode = ParallelMode::Serial);

/// Mean squared error of the model over a batch (no gradients).
double batch_loss(const RegressorModel& model, const std::vector<double>& inputs,
                  const std::vector<double>& targets, std::size_t count);

/// Versioned JSON checkpoint; save(load(x)) reproduces x byte for byte.
std::string encode_checkpoint(const RegressorModel& model);
RegressorModel decode_checkpoint(const std::string& bytes);
void save_checkpoint(const RegressorModel& model, const std::string& path);
RegressorModel load_checkpoint(const std::string& path);

}  // namespace sril
