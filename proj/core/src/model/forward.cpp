#include "v1motion/model/forward.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "v1motion/common/error.hpp"

namespace v1motion::model {

namespace {

void check_window(const Image& image, Pos x, int patch) {
  const int x0 = x.x - patch / 2;
  const int y0 = x.y - patch / 2;
  if (x0 < 0 || y0 < 0 || x0 + patch > image.width() || y0 + patch > image.height()) {
    throw BoundsError("patch of size " + std::to_string(patch) + " at (" + std::to_string(x.x) + ", " +
                      std::to_string(x.y) + ") leaves the " + std::to_string(image.width()) + "x" +
                      std::to_string(image.height()) + " image");
  }
}

void copy_patch(const Image& image, Pos x, int patch, double* out) {
  const int x0 = x.x - patch / 2;
  const int y0 = x.y - patch / 2;
  for (int r = 0; r < patch; ++r) {
    const double* row = image.samples().data() + static_cast<std::size_t>(y0 + r) * image.width() + x0;
    std::copy(row, row + patch, out + static_cast<std::size_t>(r) * patch);
  }
}

}  // namespace

Eigen::VectorXd extract_patch(const Image& image, Pos x, int patch) {
  if (patch <= 0) throw ShapeError("patch size must be positive");
  check_window(image, x, patch);
  Eigen::VectorXd out(static_cast<Eigen::Index>(patch) * patch);
  copy_patch(image, x, patch, out.data());
  return out;
}

Eigen::MatrixXd patch_matrix(const Image& image, std::span<const Pos> positions, int patch) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(patch) * patch, static_cast<Eigen::Index>(positions.size()));
  for (std::size_t i = 0; i < positions.size(); ++i) {
    check_window(image, positions[i], patch);
    copy_patch(image, positions[i], patch, out.col(static_cast<Eigen::Index>(i)).data());
  }
  return out;
}

VectorField encode(const Encoder& enc, const Image& image, std::span<const Pos> positions) {
  VectorField field;
  field.positions.assign(positions.begin(), positions.end());
  field.num_blocks = enc.num_blocks();
  field.block_dim = enc.block_dim();
  field.values.noalias() = enc.weights() * patch_matrix(image, positions, enc.patch());
  return field;
}

Image decode(const Encoder& enc, const VectorField& field, int width, int height) {
  if (field.values.rows() != enc.rows() || field.values.cols() != static_cast<Eigen::Index>(field.size())) {
    throw ShapeError("vector field does not match the encoder");
  }
  Image out(width, height);
  const int p = enc.patch();
  const Eigen::MatrixXd patches = enc.weights().transpose() * field.values;
  auto& s = out.samples();
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Pos x = field.positions[i];
    check_window(out, x, p);
    const double* col = patches.col(static_cast<Eigen::Index>(i)).data();
    const int x0 = x.x - p / 2;
    const int y0 = x.y - p / 2;
    for (int r = 0; r < p; ++r) {
      double* row = s.data() + static_cast<std::size_t>(y0 + r) * width + x0;
      for (int c = 0; c < p; ++c) row[c] += col[r * p + c];
    }
  }
  return out;
}

Eigen::VectorXd apply_motion(const MotionModel& model, const Eigen::VectorXd& v, Vec2 delta) {
  const int d = model.block_dim();
  if (v.size() != static_cast<Eigen::Index>(model.num_blocks()) * d) {
    throw ShapeError("vector length does not match the motion model");
  }
  if (model.support().size() != 1) throw ShapeError("apply_motion needs a single-offset model");
  Eigen::VectorXd out(v.size());
  for (int k = 0; k < model.num_blocks(); ++k) {
    out.segment(k * d, d).noalias() = model.matrix(k, delta) * v.segment(k * d, d);
  }
  return out;
}

NeighborhoodEncoding encode_neighborhoods(const Encoder& enc, const Image& image, std::span<const Pos> positions,
                                          const std::vector<Pos>& support, BoundaryMode mode,
                                          bool keep_patches) {
  const int p = enc.patch();
  const int lo = p / 2;
  const int hi_x = image.width() - p + p / 2;
  const int hi_y = image.height() - p + p / 2;

  NeighborhoodEncoding nb;
  nb.support_size = support.size();
  nb.column.reserve(positions.size() * support.size());
  std::map<Pos, std::size_t> seen;
  std::vector<Pos> lattice;
  for (const Pos& x : positions) {
    for (const Pos& o : support) {
      Pos q{x.x + o.x, x.y + o.y};
      if (mode == BoundaryMode::Clamp) {
        q.x = std::clamp(q.x, lo, std::max(lo, hi_x));
        q.y = std::clamp(q.y, lo, std::max(lo, hi_y));
      }
      auto [it, inserted] = seen.try_emplace(q, lattice.size());
      if (inserted) lattice.push_back(q);
      nb.column.push_back(it->second);
    }
  }
  nb.patches = patch_matrix(image, lattice, p);
  nb.lattice.positions = std::move(lattice);
  nb.lattice.num_blocks = enc.num_blocks();
  nb.lattice.block_dim = enc.block_dim();
  nb.lattice.values.noalias() = enc.weights() * nb.patches;
  if (!keep_patches) nb.patches.resize(0, 0);
  return nb;
}

Eigen::VectorXd predict_mixed(const MotionModel& model, const NeighborhoodEncoding& nb, std::size_t i,
                              std::size_t candidate) {
  const int d = model.block_dim();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.num_blocks()) * d);
  for (std::size_t j = 0; j < model.support().size(); ++j) {
    const auto v = nb.lattice.values.col(static_cast<Eigen::Index>(nb.at(i, j)));
    for (int k = 0; k < model.num_blocks(); ++k) {
      out.segment(k * d, d).noalias() += model.block(candidate, j, k) * v.segment(k * d, d);
    }
  }
  return out;
}

Eigen::VectorXd predict(const MotionModel& model, const NeighborhoodEncoding& nb, std::size_t i, Vec2 delta) {
  if (!model.parametric()) return predict_mixed(model, nb, i, model.grid().index(delta));
  const int d = model.block_dim();
  const auto v = nb.lattice.values.col(static_cast<Eigen::Index>(nb.at(i, 0)));
  Eigen::VectorXd out(v.size());
  for (int k = 0; k < model.num_blocks(); ++k) {
    out.segment(k * d, d).noalias() = model.matrix(k, delta) * v.segment(k * d, d);
  }
  return out;
}

Eigen::VectorXd apply_motion_mixed(const MotionModel& model, const Encoder& enc, const Image& current, Pos x,
                                   Vec2 delta) {
  if (model.parametric()) throw ShapeError("mixed motion needs a non-parametric model");
  const Pos positions[] = {x};
  const auto nb = encode_neighborhoods(enc, current, positions, model.support(), BoundaryMode::Strict);
  return predict_mixed(model, nb, 0, model.grid().index(delta));
}

double rotation_loss(const Encoder& enc, const MotionModel& model, const Image& current, const Image& next,
                     const DisplacementField& field) {
  if (!current.same_dims(next)) throw ShapeError("frames differ in size");
  if (enc.num_blocks() != model.num_blocks() || enc.block_dim() != model.block_dim()) {
    throw ShapeError("encoder and motion model disagree on K or d");
  }
  const auto& positions = field.positions();
  const auto target = encode(enc, next, positions);
  const auto nb = encode_neighborhoods(enc, current, positions, model.support(), BoundaryMode::Strict);
  double loss = 0.0;
  const int d = model.block_dim();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Eigen::VectorXd r = target.values.col(static_cast<Eigen::Index>(i)) - predict(model, nb, i, field.vectors[i]);
    for (int k = 0; k < model.num_blocks(); ++k) loss += r.segment(k * d, d).squaredNorm();
  }
  return loss;
}

Image reconstruct(const Encoder& enc, const GridSpec& grid, const Image& image) {
  const auto positions = grid.positions(image.width(), image.height()).positions;
  return decode(enc, encode(enc, image, positions), image.width(), image.height());
}

double reconstruction_error(const Encoder& enc, const GridSpec& grid, const Image& image) {
  const Image rec = reconstruct(enc, grid, image);
  double sum = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double e = image.samples()[i] - rec.samples()[i];
    sum += e * e;
  }
  return sum;
}

double reconstruction_loss(const Encoder& enc, const GridSpec& grid, const Image& current, const Image& next) {
  return reconstruction_error(enc, grid, current) + reconstruction_error(enc, grid, next);
}

double complex_cell_response(const Eigen::Ref<const Eigen::VectorXd>& sub_vector) {
  return sub_vector.squaredNorm();
}

}  // namespace v1motion::model
