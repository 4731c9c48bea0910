#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>

#include "v1motion/model/grid.hpp"
#include "v1motion/model/motion_model.hpp"

namespace v1motion::train {

/// Hyperparameters of supervised training. Defaults follow the reference
/// setup (Adam, learning rate 8e-4, K = 40 sub-vectors of 2 units,
/// 16x16 filters sampled every 8 pixels).
struct TrainConfig {
  double learning_rate = 0.0008;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  double lambda_rot = 1.0;
  double lambda_rec = 1.0;
  /// Weight of (|M v|^2 - |v|^2)^2; 0 disables the norm-stability penalty.
  double lambda_norm = 0.0;

  int batch_size = 32;
  int num_steps = 500;
  std::uint64_t seed = 1;
  int threads = 1;

  model::MotionKind motion = model::MotionKind::NonParametric;
  int num_blocks = 40;
  int block_dim = 2;
  model::GridSpec grid;
  model::DisplacementGrid displacements;
  /// Mixing support {-radius..radius}^2 every `support_step` (mixed variant only).
  int support_radius = 4;
  int support_step = 2;
  /// Stride of the positions where the rotation loss is evaluated;
  /// 0 uses the D- stride.
  int loss_stride = 0;

  void validate() const;
  std::vector<model::Pos> support() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
/// Reads keys present in `j` over the defaults in `cfg`. Unknown keys throw.
void update_from_json(TrainConfig& cfg, const nlohmann::json& j);

}  // namespace v1motion::train
