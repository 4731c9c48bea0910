#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "v1motion/model/encoder.hpp"
#include "v1motion/model/field.hpp"
#include "v1motion/model/image.hpp"
#include "v1motion/model/motion_model.hpp"

namespace v1motion::model {

/// Row-major p x p window centered at x (see GridSpec for the anchoring).
/// Throws BoundsError when the window leaves the image.
Eigen::VectorXd extract_patch(const Image& image, Pos x, int patch);

/// Patches for each position as columns, (p*p) x N.
Eigen::MatrixXd patch_matrix(const Image& image, std::span<const Pos> positions, int patch);

/// v^(k)(x) = W^(k) I[x] for every position. Any in-bounds positions are
/// accepted, not only D-.
VectorField encode(const Encoder& enc, const Image& image, std::span<const Pos> positions);

/// Overlap-add of W^T v(x) into a zero canvas of the given size. Positions
/// are visited in field order; pixels covered by no patch stay zero.
Image decode(const Encoder& enc, const VectorField& field, int width, int height);

/// Block-diagonal action: each sub-vector multiplied by its M^(k)(delta).
/// Valid for single-offset models (non-parametric or parametric).
Eigen::VectorXd apply_motion(const MotionModel& model, const Eigen::VectorXd& v, Vec2 delta);

/// How neighborhood offsets that leave the valid center range are handled.
enum class BoundaryMode {
  Strict,  ///< throw BoundsError
  Clamp,   ///< clamp x + dx into the valid center range
};

/// Encodings of every x + dx needed for mixed prediction, deduplicated.
///
/// `column[i * S + j]` is the lattice column holding v(positions[i] + support[j]).
struct NeighborhoodEncoding {
  VectorField lattice;
  Eigen::MatrixXd patches;  ///< (p*p) x U, kept only when requested
  std::vector<std::size_t> column;
  std::size_t support_size = 0;

  std::size_t at(std::size_t i, std::size_t j) const { return column[i * support_size + j]; }
};

NeighborhoodEncoding encode_neighborhoods(const Encoder& enc, const Image& image, std::span<const Pos> positions,
                                          const std::vector<Pos>& support, BoundaryMode mode,
                                          bool keep_patches = false);

/// Sum over the support of M^(k)(delta, dx) v^(k)(x + dx) for position i of
/// the neighborhood encoding, using candidate index `candidate`.
Eigen::VectorXd predict_mixed(const MotionModel& model, const NeighborhoodEncoding& nb, std::size_t i,
                              std::size_t candidate);

/// Mixed motion prediction at x from image I_t. Strict bounds.
Eigen::VectorXd apply_motion_mixed(const MotionModel& model, const Encoder& enc, const Image& current, Pos x,
                                   Vec2 delta);

/// Prediction M(delta) v_t(x) for any variant, computed from the neighborhood
/// encoding. For non-parametric models delta must be on the grid.
Eigen::VectorXd predict(const MotionModel& model, const NeighborhoodEncoding& nb, std::size_t i, Vec2 delta);

/// Sum over positions and k of |W^(k) I_{t+1}[x] - prediction|^2.
/// Positions are those of `field`.
double rotation_loss(const Encoder& enc, const MotionModel& model, const Image& current, const Image& next,
                     const DisplacementField& field);

/// |I - decode(encode(I))|^2 summed over both frames; encoding on D-.
double reconstruction_loss(const Encoder& enc, const GridSpec& grid, const Image& current, const Image& next);
double reconstruction_error(const Encoder& enc, const GridSpec& grid, const Image& image);

/// Complex-cell response |v^(k)|^2.
double complex_cell_response(const Eigen::Ref<const Eigen::VectorXd>& sub_vector);

/// decode(encode(I)) on D-.
Image reconstruct(const Encoder& enc, const GridSpec& grid, const Image& image);

}  // namespace v1motion::model
