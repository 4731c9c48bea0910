#include "v1motion/infer/grid_inference.hpp"

#include <limits>

#include "v1motion/common/error.hpp"
#include "v1motion/common/parallel.hpp"

namespace v1motion::infer {

model::PositionGrid inference_positions(const model::GridSpec& grid, const model::MotionModel& motion, int width,
                                        int height, const InferConfig& cfg) {
  const int radius = cfg.mixing ? motion.support_radius() : 0;
  return grid.interior_positions(width, height, radius, cfg.margin);
}

namespace {

std::vector<std::size_t> active_offsets(const model::MotionModel& motion, bool mixing) {
  if (mixing) {
    std::vector<std::size_t> all(motion.support().size());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    return all;
  }
  return {motion.center_offset()};
}

// Squared residual of one candidate; gives up once `bound` is reached
// (partial sums of squares never decrease, so the result could not win).
double scan_candidate(const double* params, std::size_t cand_base, std::size_t offset_stride,
                      const std::vector<std::size_t>& offsets, const std::vector<double>& sources,
                      const double* target, int K, int d, double bound) {
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const std::size_t kd = static_cast<std::size_t>(K) * d;
  double acc = 0.0;
  double pred[64];
  for (int k = 0; k < K; ++k) {
    for (int a = 0; a < d; ++a) pred[a] = 0.0;
    for (std::size_t jj = 0; jj < offsets.size(); ++jj) {
      const double* block = params + cand_base + offsets[jj] * offset_stride + static_cast<std::size_t>(k) * dd;
      const double* v = sources.data() + jj * kd + static_cast<std::size_t>(k) * d;
      for (int b = 0; b < d; ++b) {
        const double vb = v[b];
        const double* col = block + static_cast<std::size_t>(b) * d;
        for (int a = 0; a < d; ++a) pred[a] += col[a] * vb;
      }
    }
    const double* t = target + static_cast<std::size_t>(k) * d;
    for (int a = 0; a < d; ++a) {
      const double r = t[a] - pred[a];
      acc += r * r;
    }
    if (acc >= bound) return acc;
  }
  return acc;
}

void check_model(const model::MotionModel& motion, const model::NeighborhoodEncoding& nb,
                 const Eigen::MatrixXd& targets) {
  if (motion.parametric()) throw ShapeError("grid inference needs a non-parametric model");
  if (motion.block_dim() > 64) throw ShapeError("sub-vector dimension above 64 is not supported");
  const auto kd = static_cast<Eigen::Index>(motion.num_blocks()) * motion.block_dim();
  if (nb.lattice.values.rows() != kd || targets.rows() != kd) throw ShapeError("encodings do not match the motion model");
  if (nb.support_size != motion.support().size()) throw ShapeError("neighborhood support differs from the model");
  if (static_cast<std::size_t>(targets.cols()) * nb.support_size != nb.column.size())
    throw ShapeError("one target per neighborhood required");
}

}  // namespace

double candidate_residual(const model::MotionModel& motion, const model::NeighborhoodEncoding& nb,
                          const Eigen::Ref<const Eigen::VectorXd>& target, std::size_t i, std::size_t candidate,
                          bool mixing) {
  const int K = motion.num_blocks();
  const int d = motion.block_dim();
  const auto offsets = active_offsets(motion, mixing);
  const std::size_t kd = static_cast<std::size_t>(K) * d;
  std::vector<double> sources(offsets.size() * kd);
  for (std::size_t jj = 0; jj < offsets.size(); ++jj) {
    const auto col = nb.lattice.values.col(static_cast<Eigen::Index>(nb.at(i, offsets[jj])));
    std::copy(col.data(), col.data() + kd, sources.data() + jj * kd);
  }
  const Eigen::VectorXd t = target;
  return scan_candidate(motion.params().data(), candidate * motion.candidate_stride(),
                        static_cast<std::size_t>(K) * d * d, offsets, sources, t.data(), K, d,
                        std::numeric_limits<double>::infinity());
}

std::vector<std::size_t> best_candidates(const model::MotionModel& motion, const model::NeighborhoodEncoding& nb,
                                         const Eigen::MatrixXd& targets, bool mixing, int threads) {
  check_model(motion, nb, targets);
  const int K = motion.num_blocks();
  const int d = motion.block_dim();
  const std::size_t kd = static_cast<std::size_t>(K) * d;
  const auto offsets = active_offsets(motion, mixing);
  const auto& order = motion.grid().search_order();
  const std::size_t stride = motion.candidate_stride();
  const std::size_t offset_stride = static_cast<std::size_t>(K) * d * d;
  const double* params = motion.params().data();

  const auto n = static_cast<std::size_t>(targets.cols());
  std::vector<std::size_t> best(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> sources(offsets.size() * kd);
    for (std::size_t jj = 0; jj < offsets.size(); ++jj) {
      const auto col = nb.lattice.values.col(static_cast<Eigen::Index>(nb.at(i, offsets[jj])));
      std::copy(col.data(), col.data() + kd, sources.data() + jj * kd);
    }
    const double* target = targets.col(static_cast<Eigen::Index>(i)).data();
    double best_value = std::numeric_limits<double>::infinity();
    std::size_t best_index = order.front();
    for (std::size_t c : order) {
      const double r = scan_candidate(params, c * stride, offset_stride, offsets, sources, target, K, d, best_value);
      if (r < best_value) {
        best_value = r;
        best_index = c;
      }
    }
    best[i] = best_index;
  });
  return best;
}

model::DisplacementField infer_grid(const model::Encoder& enc, const model::MotionModel& motion,
                                    const model::GridSpec& grid, const model::Image& current,
                                    const model::Image& next, const InferConfig& cfg) {
  return infer_grid(enc, motion, inference_positions(grid, motion, current.width(), current.height(), cfg), current,
                    next, cfg);
}

model::DisplacementField infer_grid(const model::Encoder& enc, const model::MotionModel& motion,
                                    const model::PositionGrid& positions, const model::Image& current,
                                    const model::Image& next, const InferConfig& cfg) {
  cfg.validate();
  if (!current.same_dims(next)) throw ShapeError("frames differ in size");
  if (enc.num_blocks() != motion.num_blocks() || enc.block_dim() != motion.block_dim())
    throw ShapeError("encoder and motion model disagree on K or d");
  // Without mixing only the zero offset is read, so clamped neighbors are harmless.
  const auto nb = model::encode_neighborhoods(enc, current, positions.positions, motion.support(),
                                              cfg.mixing ? model::BoundaryMode::Strict : model::BoundaryMode::Clamp);
  const auto targets = model::encode(enc, next, positions.positions);
  const auto best = best_candidates(motion, nb, targets.values, cfg.mixing, cfg.threads);
  model::DisplacementField field = model::DisplacementField::zeros(positions);
  for (std::size_t i = 0; i < best.size(); ++i) field.vectors[i] = motion.grid().candidate(best[i]);
  return field;
}

}  // namespace v1motion::infer
