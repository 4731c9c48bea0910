#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "v1motion/model/grid.hpp"

namespace v1motion::model {

enum class MotionKind {
  NonParametric,       ///< M^(k)(delta), one matrix per candidate.
  NonParametricMixed,  ///< M^(k)(delta, dx), additionally indexed by support offset.
  Parametric,          ///< I + B1 d1 + B2 d2 + B11 d1^2 + B22 d2^2 + B12 d1 d2.
};

std::string to_string(MotionKind kind);
MotionKind motion_kind_from_string(const std::string& name);

/// Number of Taylor coefficient matrices in the parametric variant.
inline constexpr int kTaylorTerms = 5;

/// Taylor basis (d1, d2, d1^2, d2^2, d1*d2) and its partial derivatives.
std::array<double, kTaylorTerms> taylor_basis(Vec2 delta);
std::array<double, kTaylorTerms> taylor_basis_ddx(Vec2 delta);
std::array<double, kTaylorTerms> taylor_basis_ddy(Vec2 delta);

/// Matrix representation of local displacements.
///
/// All variants store d x d blocks (column-major) in one flat parameter
/// vector. The non-parametric variant is the mixed variant with the
/// singleton support {(0,0)}; block order is (candidate, offset, k).
/// The parametric variant stores (k, term) blocks.
class MotionModel {
 public:
  using ConstBlock = Eigen::Map<const Eigen::MatrixXd>;
  using Block = Eigen::Map<Eigen::MatrixXd>;

  MotionModel() = default;

  /// Every M^(k)(delta) = I.
  static MotionModel identity_nonparametric(int num_blocks, int block_dim, DisplacementGrid grid);
  /// M^(k)(delta, 0) = I, all other offsets zero.
  static MotionModel identity_mixed(int num_blocks, int block_dim, DisplacementGrid grid,
                                    std::vector<Pos> support);
  /// All B = 0, so M(delta) = I everywhere. `grid` only bounds the range.
  static MotionModel zero_parametric(int num_blocks, int block_dim, DisplacementGrid grid);
  /// Rebuilds a model from serialized parts; validates shapes.
  static MotionModel restore(MotionKind kind, int num_blocks, int block_dim, DisplacementGrid grid,
                             std::vector<Pos> support, std::vector<double> params);

  MotionKind kind() const { return kind_; }
  bool parametric() const { return kind_ == MotionKind::Parametric; }
  bool mixed() const { return kind_ == MotionKind::NonParametricMixed; }
  int num_blocks() const { return num_blocks_; }
  int block_dim() const { return block_dim_; }
  const DisplacementGrid& grid() const { return grid_; }
  const std::vector<Pos>& support() const { return support_; }
  std::size_t center_offset() const { return center_; }
  int support_radius() const;

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  /// Flat offset of block (candidate, offset, k); non-parametric only.
  std::size_t block_offset(std::size_t candidate, std::size_t offset, int k) const;
  /// Flat offset of coefficient (k, term); parametric only.
  std::size_t taylor_offset(int k, int term) const;
  /// Parameters per candidate (support size * K * d * d).
  std::size_t candidate_stride() const;

  ConstBlock block(std::size_t candidate, std::size_t offset, int k) const;
  Block block(std::size_t candidate, std::size_t offset, int k);
  ConstBlock taylor(int k, int term) const;

  /// M^(k)(delta). Non-parametric requires delta on the candidate grid and
  /// returns the zero-offset block.
  Eigen::MatrixXd matrix(int k, Vec2 delta) const;
  /// M^(k)(delta, support[offset]); non-parametric only.
  Eigen::MatrixXd matrix(int k, Vec2 delta, std::size_t offset) const;

  void validate() const;

 private:
  MotionKind kind_ = MotionKind::NonParametric;
  int num_blocks_ = 0;
  int block_dim_ = 0;
  DisplacementGrid grid_;
  std::vector<Pos> support_{{0, 0}};
  std::size_t center_ = 0;
  std::vector<double> params_;
};

}  // namespace v1motion::model
