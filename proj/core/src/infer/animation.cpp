#include "v1motion/infer/animation.hpp"

#include <cmath>

#include "v1motion/common/error.hpp"
#include "v1motion/infer/grid_inference.hpp"
#include "v1motion/model/forward.hpp"

namespace v1motion::infer {

namespace {

model::NeighborhoodEncoding neighborhoods(const model::Encoder& enc, const model::MotionModel& motion,
                                          const model::Image& image, const std::vector<model::Pos>& positions,
                                          bool mixing) {
  const std::vector<model::Pos> center{{0, 0}};
  return model::encode_neighborhoods(enc, image, positions, mixing ? motion.support() : center,
                                     model::BoundaryMode::Clamp);
}

}  // namespace

std::vector<model::Image> animate(const model::Encoder& enc, const model::MotionModel& motion,
                                  const model::GridSpec& grid, const model::Image& first,
                                  std::span<const model::DisplacementField> fields, bool mixing) {
  if (enc.num_blocks() != motion.num_blocks() || enc.block_dim() != motion.block_dim())
    throw ShapeError("encoder and motion model disagree on K or d");
  const int w = first.width();
  const int h = first.height();
  const auto positions = grid.positions(w, h).positions;
  const bool use_mixing = mixing && motion.mixed();

  std::vector<model::Image> frames;
  frames.reserve(fields.size());
  model::Image state = first;
  for (const auto& field : fields) {
    if (field.positions() != positions) throw ShapeError("animation fields must be defined on D-");
    const auto nb = neighborhoods(enc, motion, state, positions, use_mixing);
    model::VectorField moved;
    moved.positions = positions;
    moved.num_blocks = enc.num_blocks();
    moved.block_dim = enc.block_dim();
    moved.values.resize(enc.rows(), static_cast<Eigen::Index>(positions.size()));
    for (std::size_t i = 0; i < positions.size(); ++i) {
      const Eigen::Index col = static_cast<Eigen::Index>(i);
      if (motion.parametric() || use_mixing) {
        moved.values.col(col) = model::predict(motion, nb, i, field.vectors[i]);
      } else {
        // Single zero-offset block, also for a mixed model with mixing off.
        const std::size_t c = motion.grid().index(field.vectors[i]);
        const int d = motion.block_dim();
        const auto v = nb.lattice.values.col(static_cast<Eigen::Index>(nb.at(i, 0)));
        for (int k = 0; k < motion.num_blocks(); ++k)
          moved.values.col(col).segment(k * d, d).noalias() = motion.block(c, motion.center_offset(), k) * v.segment(k * d, d);
      }
    }
    state = model::decode(enc, moved, w, h);
    frames.push_back(state);
  }
  return frames;
}

double mean_abs_difference(const model::Image& a, const model::Image& b) {
  if (!a.same_dims(b)) throw ShapeError("images differ in size");
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a.samples()[i] - b.samples()[i]);
  return sum / static_cast<double>(a.size());
}

InterpolationResult interpolate_frames(const model::Encoder& enc, const model::MotionModel& motion,
                                       const model::GridSpec& grid, const model::Image& first,
                                       const model::Image& last, int max_steps, double threshold, bool mixing,
                                       int threads) {
  if (motion.parametric()) throw ShapeError("frame interpolation needs a non-parametric model");
  if (!first.same_dims(last)) throw ShapeError("frames differ in size");
  if (max_steps < 0) throw ConfigError("max_steps must be >= 0");
  const int w = first.width();
  const int h = first.height();
  const auto lattice = grid.positions(w, h);
  const auto target = model::encode(enc, last, lattice.positions);
  const bool use_mixing = mixing && motion.mixed();

  InterpolationResult result;
  result.frames.push_back(first);
  result.final_error = mean_abs_difference(first, last);
  for (int step = 0; step < max_steps && !(result.final_error < threshold); ++step) {
    const auto& state = result.frames.back();
    const auto nb = model::encode_neighborhoods(enc, state, lattice.positions, motion.support(),
                                                model::BoundaryMode::Clamp);
    const auto best = best_candidates(motion, nb, target.values, use_mixing, threads);
    model::DisplacementField field = model::DisplacementField::zeros(lattice);
    for (std::size_t i = 0; i < best.size(); ++i) field.vectors[i] = motion.grid().candidate(best[i]);
    const model::DisplacementField* one = &field;
    auto next = animate(enc, motion, grid, state, std::span(one, 1), use_mixing);
    result.fields.push_back(std::move(field));
    result.frames.push_back(std::move(next.front()));
    result.final_error = mean_abs_difference(result.frames.back(), last);
  }
  result.success = result.final_error < threshold;
  return result;
}

}  // namespace v1motion::infer
