#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "v1motion/model/encoder.hpp"
#include "v1motion/model/image.hpp"
#include "v1motion/model/motion_model.hpp"

namespace v1motion::analysis {

/// M^(k)(delta) W^(k) for each delta of the path; each entry is d x p^2.
/// Non-parametric models use the zero-offset matrix and need on-grid deltas.
std::vector<Eigen::MatrixXd> animate_filters(const model::Encoder& enc, const model::MotionModel& motion, int k,
                                             std::span<const model::Vec2> path);

/// p x p raw image of a filter row.
model::Image unit_image(const Eigen::Ref<const Eigen::VectorXd>& row, int patch);

/// Tiles rows into a grid. Each tile is scaled so 0 maps to 0.5 and the
/// largest magnitude to 0 or 1; padding is white.
model::Image montage(std::span<const Eigen::VectorXd> rows, int patch, int columns, int pad = 1);

}  // namespace v1motion::analysis
