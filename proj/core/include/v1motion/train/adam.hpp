#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace v1motion::train {

struct AdamConfig {
  double learning_rate = 0.0008;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moments, one buffer per parameter group.
struct AdamState {
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update, in place. Groups are matched by index;
/// the state is sized lazily on the first call.
void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state, const AdamConfig& config);

}  // namespace v1motion::train
