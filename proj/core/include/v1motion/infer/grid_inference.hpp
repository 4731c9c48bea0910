#pragma once

#include <Eigen/Dense>
#include <vector>

#include "v1motion/infer/config.hpp"
#include "v1motion/model/encoder.hpp"
#include "v1motion/model/field.hpp"
#include "v1motion/model/forward.hpp"
#include "v1motion/model/motion_model.hpp"

namespace v1motion::infer {

/// D- positions at least `margin` from the border; for a mixing model they
/// are further shrunk so every neighborhood stays inside the image.
model::PositionGrid inference_positions(const model::GridSpec& grid, const model::MotionModel& motion, int width,
                                        int height, const InferConfig& cfg);

/// Index of the candidate minimizing |target_i - prediction_i(delta)|^2 for
/// every position i of `nb`. Candidates are scanned by increasing |delta|
/// then (dx, dy), and only a strictly smaller residual replaces the best, so
/// ties resolve toward the smallest displacement.
std::vector<std::size_t> best_candidates(const model::MotionModel& motion, const model::NeighborhoodEncoding& nb,
                                         const Eigen::MatrixXd& targets, bool mixing, int threads = 1);

/// Residual |target - prediction(candidate)|^2 at position i.
double candidate_residual(const model::MotionModel& motion, const model::NeighborhoodEncoding& nb,
                          const Eigen::Ref<const Eigen::VectorXd>& target, std::size_t i, std::size_t candidate,
                          bool mixing);

/// Per-position argmin of the rotation loss over all candidates
/// (non-parametric models).
model::DisplacementField infer_grid(const model::Encoder& enc, const model::MotionModel& motion,
                                    const model::GridSpec& grid, const model::Image& current,
                                    const model::Image& next, const InferConfig& cfg = {});

/// Same on an explicit lattice.
model::DisplacementField infer_grid(const model::Encoder& enc, const model::MotionModel& motion,
                                    const model::PositionGrid& positions, const model::Image& current,
                                    const model::Image& next, const InferConfig& cfg = {});

}  // namespace v1motion::infer
