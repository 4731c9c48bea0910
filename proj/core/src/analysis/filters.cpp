#include "v1motion/analysis/filters.hpp"

#include "v1motion/common/error.hpp"

namespace v1motion::analysis {

std::vector<Eigen::MatrixXd> animate_filters(const model::Encoder& enc, const model::MotionModel& motion, int k,
                                             std::span<const model::Vec2> path) {
  if (k < 0 || k >= enc.num_blocks()) throw ShapeError("sub-vector index out of range");
  if (enc.num_blocks() != motion.num_blocks() || enc.block_dim() != motion.block_dim())
    throw ShapeError("encoder and motion model disagree on K or d");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(path.size());
  for (const auto& delta : path) {
    const Eigen::MatrixXd m =
        motion.parametric() ? motion.matrix(k, delta) : motion.matrix(k, delta, motion.center_offset());
    out.push_back(m * enc.block(k));
  }
  return out;
}

model::Image unit_image(const Eigen::Ref<const Eigen::VectorXd>& row, int patch) {
  if (row.size() != static_cast<Eigen::Index>(patch) * patch) throw ShapeError("filter length must be p*p");
  return model::Image(patch, patch, std::vector<double>(row.data(), row.data() + row.size()));
}

model::Image montage(std::span<const Eigen::VectorXd> rows, int patch, int columns, int pad) {
  if (columns < 1 || pad < 0) throw ConfigError("montage needs columns >= 1 and pad >= 0");
  const int n = static_cast<int>(rows.size());
  const int grid_rows = n == 0 ? 0 : (n + columns - 1) / columns;
  const int cols = n == 0 ? 0 : std::min(columns, n);
  const int w = std::max(1, cols * (patch + pad) + pad);
  const int h = std::max(1, grid_rows * (patch + pad) + pad);
  model::Image out(w, h, 1.0);
  for (int t = 0; t < n; ++t) {
    const auto& row = rows[static_cast<std::size_t>(t)];
    if (row.size() != static_cast<Eigen::Index>(patch) * patch) throw ShapeError("filter length must be p*p");
    const double scale = row.cwiseAbs().maxCoeff();
    const int ox = pad + (t % columns) * (patch + pad);
    const int oy = pad + (t / columns) * (patch + pad);
    for (int y = 0; y < patch; ++y)
      for (int x = 0; x < patch; ++x)
        out.at(ox + x, oy + y) = scale > 0.0 ? 0.5 + 0.5 * row[y * patch + x] / scale : 0.5;
  }
  return out;
}

}  // namespace v1motion::analysis
