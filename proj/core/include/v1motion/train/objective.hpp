#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "v1motion/model/encoder.hpp"
#include "v1motion/model/field.hpp"
#include "v1motion/model/motion_model.hpp"

namespace v1motion::train {

/// (I_t, field on the evaluation lattice, I_{t+1}). Non-owning.
struct Triplet {
  const model::Image* current = nullptr;
  const model::DisplacementField* field = nullptr;
  const model::Image* next = nullptr;
};

struct LossWeights {
  double rotation = 1.0;
  double reconstruction = 1.0;
  double norm = 0.0;
};

/// Batch-averaged objective and its gradient with respect to every
/// trainable parameter. `d_motion` mirrors MotionModel::params().
struct GradientBundle {
  double loss = 0.0;            ///< weighted total
  double rotation = 0.0;        ///< unweighted sum of L1 terms, batch mean
  double reconstruction = 0.0;  ///< unweighted L2, batch mean
  double norm = 0.0;            ///< unweighted norm-stability penalty, batch mean
  Eigen::MatrixXd d_weights;
  std::vector<double> d_motion;
};

/// Exact gradient of mean_b [w_rot L1_b + w_rec L2_b + w_norm N_b].
///
/// L1 is evaluated at the positions of each triplet's field (non-parametric
/// models need on-grid displacements); L2 encodes and decodes on the D-
/// positions of `grid`. Throws NumericError on a non-finite loss.
GradientBundle grad_total(const model::Encoder& enc, const model::MotionModel& motion,
                          const model::GridSpec& grid, std::span<const Triplet> batch, const LossWeights& weights,
                          int threads = 1);

/// Same objective without gradients.
GradientBundle evaluate_objective(const model::Encoder& enc, const model::MotionModel& motion,
                                  const model::GridSpec& grid, std::span<const Triplet> batch,
                                  const LossWeights& weights, int threads = 1);

}  // namespace v1motion::train
