#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sril/core_types.hpp"

namespace sril {

struct PolicyInput {
  Observation obs;
  SensoryState state;
};

/// One inference's prediction: K actions covering timesteps
/// issued_at+1 .. issued_at+K.
struct ActionChunk {
  std::int64_t issued_at = 0;
  std::vector<Action> actions;

  bool operator==(const ActionChunk&) const = default;
};

/// Chunk-predicting policy contract: observation + sensory state in, a
/// fixed-length action chunk out. Implemented by the scripted expert and
/// the trained regressor; the executor does not care which.
class PolicyOracle {
 public:
  virtual ~PolicyOracle() = default;
  virtual std::size_t chunk_length() const = 0;
  virtual std::size_t joint_dimension() const = 0;
  virtual ActionChunk predict_chunk(const PolicyInput& input, std::int64_t t) const = 0;
};

/// Mean squared error over all components. Throws on shape mismatch.
double mse_loss(std::span<const double> predicted, std::span<const double> truth);
double mse_loss(const std::vector<ActionChunk>& predicted,
                const std::vector<ActionChunk>& truth);

}  // namespace sril
