#include "sril/policy.hpp"

#include <stdexcept>

namespace sril {

double mse_loss(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size())
    throw std::runtime_error("mse_loss: shape mismatch (" + std::to_string(predicted.size()) +
                             " vs " + std::to_string(truth.size()) + ")");
  if (predicted.empty()) throw std::runtime_error("mse_loss: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - truth[i];
    acc += d * d;
  }
  return acc / static_cast<double>(predicted.size());
}

double mse_loss(const std::vector<ActionChunk>& predicted,
                const std::vector<ActionChunk>& truth) {
  if (predicted.size() != truth.size())
    throw std::runtime_error("mse_loss: chunk count mismatch");
  std::vector<double> p, t;
  for (std::size_t c = 0; c < predicted.size(); ++c) {
    if (predicted[c].actions.size() != truth[c].actions.size())
      throw std::runtime_error("mse_loss: chunk length mismatch");
    for (std::size_t k = 0; k < predicted[c].actions.size(); ++k) {
      const Action& pa = predicted[c].actions[k];
      const Action& ta = truth[c].actions[k];
      if (pa.target_pos.size() != ta.target_pos.size() ||
          pa.target_vel.size() != ta.target_vel.size())
        throw std::runtime_error("mse_loss: action dimension mismatch");
      p.insert(p.end(), pa.target_pos.begin(), pa.target_pos.end());
      p.insert(p.end(), pa.target_vel.begin(), pa.target_vel.end());
      t.insert(t.end(), ta.target_pos.begin(), ta.target_pos.end());
      t.insert(t.end(), ta.target_vel.begin(), ta.target_vel.end());
    }
  }
  return mse_loss(std::span<const double>(p), std::span<const double>(t));
}

}  // namespace sril
