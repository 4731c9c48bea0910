#include "v1motion/model/motion_model.hpp"

#include <algorithm>
#include <cmath>

#include "v1motion/common/error.hpp"

namespace v1motion::model {

std::string to_string(MotionKind kind) {
  switch (kind) {
    case MotionKind::NonParametric: return "nonparametric";
    case MotionKind::NonParametricMixed: return "mixed";
    case MotionKind::Parametric: return "parametric";
  }
  return "unknown";
}

MotionKind motion_kind_from_string(const std::string& name) {
  if (name == "nonparametric") return MotionKind::NonParametric;
  if (name == "mixed") return MotionKind::NonParametricMixed;
  if (name == "parametric") return MotionKind::Parametric;
  throw ConfigError("unknown motion variant '" + name + "' (expected nonparametric, mixed or parametric)");
}

std::array<double, kTaylorTerms> taylor_basis(Vec2 d) {
  return {d.dx, d.dy, d.dx * d.dx, d.dy * d.dy, d.dx * d.dy};
}

std::array<double, kTaylorTerms> taylor_basis_ddx(Vec2 d) { return {1.0, 0.0, 2.0 * d.dx, 0.0, d.dy}; }

std::array<double, kTaylorTerms> taylor_basis_ddy(Vec2 d) { return {0.0, 1.0, 0.0, 2.0 * d.dy, d.dx}; }

namespace {

void check_dims(int num_blocks, int block_dim) {
  if (num_blocks <= 0 || block_dim <= 0) throw ShapeError("motion model needs K > 0 and d > 0");
}

}  // namespace

MotionModel MotionModel::identity_nonparametric(int num_blocks, int block_dim, DisplacementGrid grid) {
  MotionModel m = identity_mixed(num_blocks, block_dim, std::move(grid), {{0, 0}});
  m.kind_ = MotionKind::NonParametric;
  return m;
}

MotionModel MotionModel::identity_mixed(int num_blocks, int block_dim, DisplacementGrid grid,
                                        std::vector<Pos> support) {
  check_dims(num_blocks, block_dim);
  const auto center = std::find(support.begin(), support.end(), Pos{0, 0});
  if (center == support.end()) throw ShapeError("mixing support must contain the zero offset");

  MotionModel m;
  m.kind_ = MotionKind::NonParametricMixed;
  m.num_blocks_ = num_blocks;
  m.block_dim_ = block_dim;
  m.grid_ = std::move(grid);
  m.center_ = static_cast<std::size_t>(center - support.begin());
  m.support_ = std::move(support);
  m.params_.assign(m.grid_.size() * m.candidate_stride(), 0.0);
  for (std::size_t c = 0; c < m.grid_.size(); ++c) {
    for (int k = 0; k < num_blocks; ++k) m.block(c, m.center_, k).setIdentity();
  }
  return m;
}

MotionModel MotionModel::zero_parametric(int num_blocks, int block_dim, DisplacementGrid grid) {
  check_dims(num_blocks, block_dim);
  MotionModel m;
  m.kind_ = MotionKind::Parametric;
  m.num_blocks_ = num_blocks;
  m.block_dim_ = block_dim;
  m.grid_ = std::move(grid);
  m.params_.assign(static_cast<std::size_t>(num_blocks) * kTaylorTerms * block_dim * block_dim, 0.0);
  return m;
}

MotionModel MotionModel::restore(MotionKind kind, int num_blocks, int block_dim, DisplacementGrid grid,
                                 std::vector<Pos> support, std::vector<double> params) {
  MotionModel m;
  switch (kind) {
    case MotionKind::Parametric: m = zero_parametric(num_blocks, block_dim, std::move(grid)); break;
    case MotionKind::NonParametric: m = identity_nonparametric(num_blocks, block_dim, std::move(grid)); break;
    case MotionKind::NonParametricMixed:
      m = identity_mixed(num_blocks, block_dim, std::move(grid), std::move(support));
      break;
  }
  if (params.size() != m.params_.size()) throw ShapeError("motion parameter count does not match its shape");
  m.params_ = std::move(params);
  m.validate();
  return m;
}

int MotionModel::support_radius() const { return model::support_radius(support_); }

std::size_t MotionModel::candidate_stride() const {
  return support_.size() * static_cast<std::size_t>(num_blocks_) * block_dim_ * block_dim_;
}

std::size_t MotionModel::block_offset(std::size_t candidate, std::size_t offset, int k) const {
  const std::size_t dd = static_cast<std::size_t>(block_dim_) * block_dim_;
  return ((candidate * support_.size() + offset) * num_blocks_ + k) * dd;
}

std::size_t MotionModel::taylor_offset(int k, int term) const {
  const std::size_t dd = static_cast<std::size_t>(block_dim_) * block_dim_;
  return (static_cast<std::size_t>(k) * kTaylorTerms + term) * dd;
}

MotionModel::ConstBlock MotionModel::block(std::size_t candidate, std::size_t offset, int k) const {
  return ConstBlock(params_.data() + block_offset(candidate, offset, k), block_dim_, block_dim_);
}

MotionModel::Block MotionModel::block(std::size_t candidate, std::size_t offset, int k) {
  return Block(params_.data() + block_offset(candidate, offset, k), block_dim_, block_dim_);
}

MotionModel::ConstBlock MotionModel::taylor(int k, int term) const {
  return ConstBlock(params_.data() + taylor_offset(k, term), block_dim_, block_dim_);
}

Eigen::MatrixXd MotionModel::matrix(int k, Vec2 delta) const {
  if (k < 0 || k >= num_blocks_) throw ShapeError("sub-vector index out of range");
  if (!parametric()) return block(grid_.index(delta), center_, k);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(block_dim_, block_dim_);
  const auto phi = taylor_basis(delta);
  for (int t = 0; t < kTaylorTerms; ++t) m += phi[t] * taylor(k, t);
  return m;
}

Eigen::MatrixXd MotionModel::matrix(int k, Vec2 delta, std::size_t offset) const {
  if (parametric()) throw ShapeError("parametric motion has no offset-indexed matrices");
  if (k < 0 || k >= num_blocks_) throw ShapeError("sub-vector index out of range");
  if (offset >= support_.size()) throw ShapeError("support offset index out of range");
  return block(grid_.index(delta), offset, k);
}

void MotionModel::validate() const {
  const std::size_t expected = parametric()
                                   ? static_cast<std::size_t>(num_blocks_) * kTaylorTerms * block_dim_ * block_dim_
                                   : grid_.size() * candidate_stride();
  if (params_.size() != expected) throw ShapeError("motion parameter count does not match its shape");
  for (double v : params_) {
    if (!std::isfinite(v)) throw NumericError("motion model has non-finite parameters");
  }
}

}  // namespace v1motion::model
