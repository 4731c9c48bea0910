#pragma once

#include <Eigen/Dense>
#include <span>

#include "v1motion/model/encoder.hpp"
#include "v1motion/model/motion_model.hpp"

namespace v1motion::infer {

/// Running accumulator u_i = v_i + M(delta) u_{i-1}, u_{-1} = 0, applied per
/// sub-vector.
class AlignmentState {
 public:
  AlignmentState(const model::MotionModel& motion, model::Vec2 delta, int horizon);

  /// Folds in the encoding of the next frame; at most horizon + 1 pushes.
  void push(const Eigen::Ref<const Eigen::VectorXd>& v);
  const Eigen::VectorXd& u() const { return u_; }
  /// Pushes so far minus one (the index i of the latest frame); -1 when empty.
  int step() const { return step_; }
  int horizon() const { return horizon_; }
  double score() const { return u_.squaredNorm(); }

 private:
  std::vector<Eigen::MatrixXd> blocks_;
  int block_dim_;
  int horizon_;
  int step_ = -1;
  Eigen::VectorXd u_;
};

struct AlignmentResult {
  Eigen::VectorXd u;
  double score = 0.0;  ///< |u_m|^2
};

/// Recurrence over already-encoded vectors v_t .. v_{t+m} at one position.
AlignmentResult align_recurrent(const model::MotionModel& motion, std::span<const Eigen::VectorXd> vectors,
                                model::Vec2 delta);

/// Encodes frames I_t .. I_{t+m} at x and runs the recurrence. Single-offset
/// models only (the zero-offset matrix of a mixed model is used).
AlignmentResult align_recurrent(const model::Encoder& enc, const model::MotionModel& motion,
                                std::span<const model::Image> frames, model::Pos x, model::Vec2 delta);

/// Candidate maximizing the m-step alignment score at x; ties resolve as in
/// grid inference (smallest |delta|, then (dx, dy)).
model::Vec2 estimate_velocity(const model::Encoder& enc, const model::MotionModel& motion,
                              std::span<const model::Image> frames, model::Pos x);

}  // namespace v1motion::infer
