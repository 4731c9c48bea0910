#include "v1motion/infer/alignment.hpp"

#include <limits>

#include "v1motion/common/error.hpp"
#include "v1motion/model/forward.hpp"

namespace v1motion::infer {

AlignmentState::AlignmentState(const model::MotionModel& motion, model::Vec2 delta, int horizon)
    : block_dim_(motion.block_dim()), horizon_(horizon) {
  if (horizon < 0) throw ConfigError("alignment horizon must be >= 0");
  blocks_.reserve(static_cast<std::size_t>(motion.num_blocks()));
  for (int k = 0; k < motion.num_blocks(); ++k)
    blocks_.push_back(motion.parametric() ? motion.matrix(k, delta) : motion.matrix(k, delta, motion.center_offset()));
  u_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(motion.num_blocks()) * block_dim_);
}

void AlignmentState::push(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != u_.size()) throw ShapeError("alignment vector length does not match the model");
  if (step_ >= horizon_) throw ConfigError("alignment horizon exceeded");
  const int d = block_dim_;
  Eigen::VectorXd next = v;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto o = static_cast<Eigen::Index>(k) * d;
    next.segment(o, d).noalias() += blocks_[k] * u_.segment(o, d);
  }
  u_ = std::move(next);
  ++step_;
}

AlignmentResult align_recurrent(const model::MotionModel& motion, std::span<const Eigen::VectorXd> vectors,
                                model::Vec2 delta) {
  if (vectors.empty()) throw ConfigError("alignment needs at least one frame");
  AlignmentState state(motion, delta, static_cast<int>(vectors.size()) - 1);
  for (const auto& v : vectors) state.push(v);
  return {state.u(), state.score()};
}

namespace {

std::vector<Eigen::VectorXd> encode_at(const model::Encoder& enc, std::span<const model::Image> frames, model::Pos x) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(enc.weights() * model::extract_patch(f, x, enc.patch()));
  return out;
}

}  // namespace

AlignmentResult align_recurrent(const model::Encoder& enc, const model::MotionModel& motion,
                                std::span<const model::Image> frames, model::Pos x, model::Vec2 delta) {
  if (enc.num_blocks() != motion.num_blocks() || enc.block_dim() != motion.block_dim())
    throw ShapeError("encoder and motion model disagree on K or d");
  return align_recurrent(motion, encode_at(enc, frames, x), delta);
}

model::Vec2 estimate_velocity(const model::Encoder& enc, const model::MotionModel& motion,
                              std::span<const model::Image> frames, model::Pos x) {
  if (enc.num_blocks() != motion.num_blocks() || enc.block_dim() != motion.block_dim())
    throw ShapeError("encoder and motion model disagree on K or d");
  const auto vectors = encode_at(enc, frames, x);
  if (vectors.empty()) throw ConfigError("velocity estimation needs at least one frame");
  double best = -std::numeric_limits<double>::infinity();
  model::Vec2 arg{};
  for (std::size_t c : motion.grid().search_order()) {
    const model::Vec2 delta = motion.grid().candidate(c);
    const double s = align_recurrent(motion, vectors, delta).score;
    if (s > best) {
      best = s;
      arg = delta;
    }
  }
  return arg;
}

}  // namespace v1motion::infer
