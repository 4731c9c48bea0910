#pragma once

#include <functional>
#include <span>
#include <vector>

#include "v1motion/common/error.hpp"
#include "v1motion/data/sample.hpp"
#include "v1motion/model/encoder.hpp"
#include "v1motion/model/field.hpp"
#include "v1motion/model/motion_model.hpp"
#include "v1motion/train/config.hpp"
#include "v1motion/train/objective.hpp"

namespace v1motion::train {

struct LossRecord {
  int step = 0;
  double loss = 0.0;
  double rotation = 0.0;
  double reconstruction = 0.0;

  friend bool operator==(const LossRecord&, const LossRecord&) = default;
};

struct TrainResult {
  model::Encoder encoder;
  model::MotionModel motion;
  std::vector<LossRecord> history;  ///< one entry per optimizer step (mini-batch loss before the update)
};

/// Thrown when the objective stops being finite; carries the history so far.
class TrainingDiverged : public NumericError {
 public:
  TrainingDiverged(const std::string& what, std::vector<LossRecord> history)
      : NumericError(what), history_(std::move(history)) {}
  const std::vector<LossRecord>& history() const { return history_; }

 private:
  std::vector<LossRecord> history_;
};

using StepCallback = std::function<void(const LossRecord&)>;

/// Identity-initialized motion model of the configured variant.
model::MotionModel initial_motion(const TrainConfig& cfg);

/// Lattice where the rotation loss is evaluated for images of this size:
/// D- (or the `loss_stride` lattice) shrunk to leave room for the support.
model::PositionGrid loss_positions(const TrainConfig& cfg, int width, int height);

/// Ground-truth fields sampled on the loss lattice; rounded to the candidate
/// grid for non-parametric variants.
std::vector<model::DisplacementField> training_fields(std::span<const data::SamplePair> pairs,
                                                      const TrainConfig& cfg);

/// Builds non-owning triplets over `pairs` and `fields`.
std::vector<Triplet> make_triplets(std::span<const data::SamplePair> pairs,
                                   std::span<const model::DisplacementField> fields);

/// Mini-batch Adam on the weighted rotation + reconstruction objective.
/// W starts as N(0,1)/p, non-parametric M as identity, parametric B as zero.
TrainResult train_supervised(std::span<const data::SamplePair> pairs, const TrainConfig& cfg,
                             const StepCallback& on_step = {});

/// Same loop from given initial parameters.
TrainResult train_supervised(std::span<const data::SamplePair> pairs, const TrainConfig& cfg,
                             model::Encoder encoder, model::MotionModel motion, const StepCallback& on_step = {});

/// The loop itself, over fixed triplets.
TrainResult train_on_triplets(std::span<const Triplet> triplets, const TrainConfig& cfg, model::Encoder encoder,
                              model::MotionModel motion, const StepCallback& on_step = {});

/// Weighted objective over every pair (no gradients).
GradientBundle full_batch_objective(const model::Encoder& enc, const model::MotionModel& motion,
                                    std::span<const data::SamplePair> pairs, const TrainConfig& cfg);

LossWeights loss_weights(const TrainConfig& cfg);

}  // namespace v1motion::train
