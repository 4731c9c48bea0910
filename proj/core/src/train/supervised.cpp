#include "v1motion/train/supervised.hpp"

#include <numeric>
#include <sstream>

#include "v1motion/common/rng.hpp"
#include "v1motion/train/adam.hpp"

namespace v1motion::train {

LossWeights loss_weights(const TrainConfig& cfg) {
  return {cfg.lambda_rot, cfg.lambda_rec, cfg.lambda_norm};
}

model::MotionModel initial_motion(const TrainConfig& cfg) {
  switch (cfg.motion) {
    case model::MotionKind::NonParametric:
      return model::MotionModel::identity_nonparametric(cfg.num_blocks, cfg.block_dim, cfg.displacements);
    case model::MotionKind::NonParametricMixed:
      return model::MotionModel::identity_mixed(cfg.num_blocks, cfg.block_dim, cfg.displacements, cfg.support());
    case model::MotionKind::Parametric:
      return model::MotionModel::zero_parametric(cfg.num_blocks, cfg.block_dim, cfg.displacements);
  }
  throw ConfigError("unknown motion variant");
}

model::PositionGrid loss_positions(const TrainConfig& cfg, int width, int height) {
  model::GridSpec lattice = cfg.grid;
  if (cfg.loss_stride > 0) lattice.stride = std::min(cfg.loss_stride, lattice.patch);
  const int radius = cfg.motion == model::MotionKind::NonParametricMixed ? cfg.support_radius : 0;
  return lattice.interior_positions(width, height, radius, 0);
}

std::vector<model::DisplacementField> training_fields(std::span<const data::SamplePair> pairs,
                                                      const TrainConfig& cfg) {
  std::vector<model::DisplacementField> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    auto field = model::DisplacementField::sample(
        pair.flow, loss_positions(cfg, pair.current.width(), pair.current.height()));
    if (cfg.motion != model::MotionKind::Parametric) field = model::round_to_grid(field, cfg.displacements);
    out.push_back(std::move(field));
  }
  return out;
}

std::vector<Triplet> make_triplets(std::span<const data::SamplePair> pairs,
                                   std::span<const model::DisplacementField> fields) {
  if (pairs.size() != fields.size()) throw ShapeError("one field per pair required");
  std::vector<Triplet> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = {&pairs[i].current, &fields[i], &pairs[i].next};
  return out;
}

TrainResult train_supervised(std::span<const data::SamplePair> pairs, const TrainConfig& cfg,
                             const StepCallback& on_step) {
  cfg.validate();
  return train_supervised(pairs, cfg, model::Encoder::random(cfg.num_blocks, cfg.block_dim, cfg.grid.patch, cfg.seed),
                          initial_motion(cfg), on_step);
}

TrainResult train_supervised(std::span<const data::SamplePair> pairs, const TrainConfig& cfg,
                             model::Encoder encoder, model::MotionModel motion, const StepCallback& on_step) {
  cfg.validate();
  const auto fields = training_fields(pairs, cfg);
  const auto triplets = make_triplets(pairs, fields);
  return train_on_triplets(triplets, cfg, std::move(encoder), std::move(motion), on_step);
}

TrainResult train_on_triplets(std::span<const Triplet> triplets, const TrainConfig& cfg, model::Encoder encoder,
                              model::MotionModel motion, const StepCallback& on_step) {
  cfg.validate();
  if (triplets.empty()) throw ShapeError("training needs at least one pair");
  if (encoder.patch() != cfg.grid.patch) throw ShapeError("encoder patch size differs from the grid");
  if (motion.kind() != cfg.motion) throw ShapeError("motion model variant differs from the config");

  const LossWeights weights = loss_weights(cfg);
  const AdamConfig adam{cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon};
  AdamState state;

  Rng rng = make_rng(cfg.seed, 0xBA7C4);
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = order.size();

  TrainResult result{std::move(encoder), std::move(motion), {}};
  result.history.reserve(static_cast<std::size_t>(cfg.num_steps));
  std::vector<Triplet> batch(static_cast<std::size_t>(std::min<std::size_t>(cfg.batch_size, triplets.size())));

  for (int step = 0; step < cfg.num_steps; ++step) {
    for (auto& item : batch) {
      if (cursor == order.size()) {
        // Fisher-Yates reshuffle at every epoch boundary.
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
        cursor = 0;
      }
      item = triplets[order[cursor++]];
    }

    GradientBundle g;
    try {
      g = grad_total(result.encoder, result.motion, cfg.grid, batch, weights, cfg.threads);
    } catch (const NumericError& e) {
      std::ostringstream msg;
      msg << "training diverged at step " << step << ": " << e.what();
      throw TrainingDiverged(msg.str(), result.history);
    }
    const LossRecord record{step, g.loss, g.rotation, g.reconstruction};
    result.history.push_back(record);
    if (on_step) on_step(record);

    auto& w = result.encoder.weights();
    const std::span<double> params[] = {{w.data(), static_cast<std::size_t>(w.size())},
                                        {result.motion.params().data(), result.motion.params().size()}};
    const std::span<const double> grads[] = {
        {g.d_weights.data(), static_cast<std::size_t>(g.d_weights.size())}, {g.d_motion.data(), g.d_motion.size()}};
    adam_step(params, grads, state, adam);
  }
  return result;
}

GradientBundle full_batch_objective(const model::Encoder& enc, const model::MotionModel& motion,
                                    std::span<const data::SamplePair> pairs, const TrainConfig& cfg) {
  const auto fields = training_fields(pairs, cfg);
  const auto triplets = make_triplets(pairs, fields);
  return evaluate_objective(enc, motion, cfg.grid, triplets, loss_weights(cfg), cfg.threads);
}

}  // namespace v1motion::train
