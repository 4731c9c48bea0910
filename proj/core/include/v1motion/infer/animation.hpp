#pragma once

#include <span>
#include <vector>

#include "v1motion/model/encoder.hpp"
#include "v1motion/model/field.hpp"
#include "v1motion/model/motion_model.hpp"

namespace v1motion::infer {

/// Frames I_1..I_T from I_0: each step moves the current encoding of D- by
/// the step's field, decodes, and re-encodes the decoded frame. Fields must
/// live on D- (on-grid values for non-parametric models). Mixed models use
/// neighborhoods clamped to the image.
std::vector<model::Image> animate(const model::Encoder& enc, const model::MotionModel& motion,
                                  const model::GridSpec& grid, const model::Image& first,
                                  std::span<const model::DisplacementField> fields, bool mixing = true);

struct InterpolationResult {
  std::vector<model::Image> frames;               ///< I_0 followed by every generated frame
  std::vector<model::DisplacementField> fields;  ///< displacement chosen at each step
  bool success = false;
  double final_error = 0.0;  ///< mean |I_t - I_T| of the last frame
};

double mean_abs_difference(const model::Image& a, const model::Image& b);

/// Steps from I_0 toward I_T. Each step picks, per D- position, the candidate
/// whose prediction is closest to the fixed target encoding v_T, then decodes
/// and re-encodes. Stops once mean |I_t - I_T| < threshold (checked before
/// every step, so I_0 = I_T succeeds with no steps) or after max_steps.
InterpolationResult interpolate_frames(const model::Encoder& enc, const model::MotionModel& motion,
                                       const model::GridSpec& grid, const model::Image& first,
                                       const model::Image& last, int max_steps = 10, double threshold = 10.0 / 255.0,
                                       bool mixing = true, int threads = 1);

}  // namespace v1motion::infer
