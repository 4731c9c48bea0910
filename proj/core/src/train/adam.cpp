#include "v1motion/train/adam.hpp"

#include <cmath>

#include "v1motion/common/error.hpp"

namespace v1motion::train {

void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state, const AdamConfig& config) {
  if (params.size() != grads.size()) throw ShapeError("adam: parameter and gradient group counts differ");
  if (state.first.empty()) {
    for (const auto& p : params) {
      state.first.emplace_back(p.size(), 0.0);
      state.second.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first.size() != params.size()) throw ShapeError("adam: state does not match parameter groups");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t g = 0; g < params.size(); ++g) {
    auto p = params[g];
    auto grad = grads[g];
    auto& m = state.first[g];
    auto& v = state.second[g];
    if (p.size() != grad.size() || p.size() != m.size()) throw ShapeError("adam: group sizes differ");
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
      p[i] -= config.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + config.epsilon);
    }
  }
}

}  // namespace v1motion::train
