#pragma once

#include <functional>
#include <span>
#include <vector>

#include "v1motion/infer/config.hpp"
#include "v1motion/model/encoder.hpp"
#include "v1motion/model/field.hpp"
#include "v1motion/model/motion_model.hpp"
#include "v1motion/train/config.hpp"
#include "v1motion/train/supervised.hpp"

namespace v1motion::train {

struct UnsupervisedConfig {
  /// Shared hyperparameters; the motion variant must be parametric and the
  /// displacement range bounds both self-deformation and inference.
  TrainConfig train;
  /// Stage 1: self-deformed single frames.
  int init_pairs = 256;
  int init_steps = 500;
  int control = 4;
  /// Stage 3: alternation.
  int rounds = 5;
  int steps_per_round = 100;
  /// Stop when the mean per-position field change drops below this (pixels).
  double stop_change = 0.05;
  infer::InferConfig infer;

  void validate() const;
};

nlohmann::json to_json(const UnsupervisedConfig& cfg);
void update_from_json(UnsupervisedConfig& cfg, const nlohmann::json& j);

struct RoundRecord {
  int round = 0;                 ///< 0 is the state right after stage 2
  double objective = 0.0;        ///< full-batch objective after re-inference
  double field_change = 0.0;     ///< mean |delta_new - delta_old| (0 for round 0)
};

struct UnsupervisedResult {
  model::Encoder encoder;
  model::MotionModel motion;
  std::vector<model::DisplacementField> fields;  ///< one per adjacent frame pair, in sequence order
  std::vector<LossRecord> init_history;
  std::vector<RoundRecord> rounds;
};

/// Real adjacent-frame pairs, in sequence order.
struct FramePair {
  const model::Image* current;
  const model::Image* next;
};
std::vector<FramePair> adjacent_pairs(std::span<const std::vector<model::Image>> sequences);

/// mean over pairs of lambda_rot (L1 + smoothness S) + lambda_rec L2, the
/// quantity both alternation phases decrease.
double unsupervised_objective(const model::Encoder& enc, const model::MotionModel& motion,
                              std::span<const FramePair> pairs, std::span<const model::DisplacementField> fields,
                              const UnsupervisedConfig& cfg);

using RoundCallback = std::function<void(const RoundRecord&)>;

/// (1) supervised training on self-deformed frames, (2) parametric inference
/// on every adjacent pair, (3) alternate training on the inferred fields and
/// warm-started re-inference. Reconstruction uses real frames only.
UnsupervisedResult train_unsupervised(std::span<const std::vector<model::Image>> sequences,
                                      const UnsupervisedConfig& cfg, const RoundCallback& on_round = {});

}  // namespace v1motion::train
