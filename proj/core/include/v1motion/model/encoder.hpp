#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "v1motion/model/grid.hpp"

namespace v1motion::model {

/// Linear patch encoder W, partitioned into K sub-matrices W^(k) of d rows.
///
/// The stacked matrix is (K*d) x (p*p); rows are filters over a row-major
/// p x p patch. K*d may be smaller or larger than p*p.
class Encoder {
 public:
  Encoder() = default;
  Encoder(int num_blocks, int block_dim, int patch);
  Encoder(int num_blocks, int block_dim, int patch, Eigen::MatrixXd weights);

  /// Entries i.i.d. N(0, 1) scaled by 1/p.
  static Encoder random(int num_blocks, int block_dim, int patch, std::uint64_t seed);

  int num_blocks() const { return num_blocks_; }
  int block_dim() const { return block_dim_; }
  int patch() const { return patch_; }
  int rows() const { return num_blocks_ * block_dim_; }
  int cols() const { return patch_ * patch_; }
  bool overcomplete() const { return rows() > cols(); }

  const Eigen::MatrixXd& weights() const { return weights_; }
  Eigen::MatrixXd& weights() { return weights_; }

  /// W^(k), a d x p^2 view.
  auto block(int k) const { return weights_.middleRows(k * block_dim_, block_dim_); }
  auto block(int k) { return weights_.middleRows(k * block_dim_, block_dim_); }

  /// Throws if any entry is non-finite or the shape is inconsistent.
  void validate() const;

 private:
  int num_blocks_ = 0;
  int block_dim_ = 0;
  int patch_ = 0;
  Eigen::MatrixXd weights_;
};

/// Encoded vectors v(x) for a list of positions; column i holds v(positions[i]).
struct VectorField {
  std::vector<Pos> positions;
  Eigen::MatrixXd values;  // (K*d) x N
  int num_blocks = 0;
  int block_dim = 0;

  std::size_t size() const { return positions.size(); }
  /// v^(k)(positions[i]).
  auto sub(int k, std::size_t i) const {
    return values.col(static_cast<Eigen::Index>(i)).segment(k * block_dim, block_dim);
  }
};

}  // namespace v1motion::model
