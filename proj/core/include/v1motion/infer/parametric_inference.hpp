#pragma once

#include <optional>
#include <vector>

#include "v1motion/infer/config.hpp"
#include "v1motion/model/encoder.hpp"
#include "v1motion/model/field.hpp"
#include "v1motion/model/motion_model.hpp"

namespace v1motion::infer {

struct ParametricResult {
  model::DisplacementField field;
  std::vector<double> objective;  ///< initial value, then one entry per accepted step
  int iterations = 0;
  bool converged = false;
  bool diverged = false;  ///< the initial objective was not finite; `field` is the initial field
};

/// Encodings needed by the parametric objective on a fixed lattice.
struct ParametricProblem {
  model::PositionGrid positions;
  Eigen::MatrixXd source;  ///< v_t(x), (K*d) x N
  Eigen::MatrixXd target;  ///< v_{t+1}(x)
};

ParametricProblem make_problem(const model::Encoder& enc, const model::Image& current, const model::Image& next,
                               const model::PositionGrid& positions);

/// sum_x |v_{t+1}(x) - M(delta(x)) v_t(x)|^2 + smoothness * sum |forward difference of delta|^2.
double parametric_objective(const model::MotionModel& motion, const ParametricProblem& problem,
                            const std::vector<model::Vec2>& field, double smoothness);

/// Gradient of `parametric_objective` with respect to every delta(x).
std::vector<model::Vec2> parametric_gradient(const model::MotionModel& motion, const ParametricProblem& problem,
                                             const std::vector<model::Vec2>& field, double smoothness);

/// Gradient descent with backtracking from a uniform [-0.5, 0.5] random
/// field, or from `init` when given (same lattice). Displacements are kept
/// inside the model's range.
ParametricResult infer_parametric_detailed(const model::Encoder& enc, const model::MotionModel& motion,
                                           const model::GridSpec& grid, const model::Image& current,
                                           const model::Image& next, const InferConfig& cfg = {},
                                           const model::DisplacementField* init = nullptr);

model::DisplacementField infer_parametric(const model::Encoder& enc, const model::MotionModel& motion,
                                          const model::GridSpec& grid, const model::Image& current,
                                          const model::Image& next, const InferConfig& cfg = {},
                                          const model::DisplacementField* init = nullptr);

}  // namespace v1motion::infer
