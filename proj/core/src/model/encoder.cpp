#include "v1motion/model/encoder.hpp"

#include <cmath>

#include "v1motion/common/error.hpp"
#include "v1motion/common/rng.hpp"
#include "v1motion/model/field.hpp"

namespace v1motion::model {

Encoder::Encoder(int num_blocks, int block_dim, int patch)
    : Encoder(num_blocks, block_dim, patch,
              Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_blocks) * block_dim,
                                    static_cast<Eigen::Index>(patch) * patch)) {}

Encoder::Encoder(int num_blocks, int block_dim, int patch, Eigen::MatrixXd weights)
    : num_blocks_(num_blocks), block_dim_(block_dim), patch_(patch), weights_(std::move(weights)) {
  if (num_blocks <= 0 || block_dim <= 0 || patch <= 0) {
    throw ShapeError("encoder needs K > 0, d > 0 and p > 0");
  }
  validate();
}

Encoder Encoder::random(int num_blocks, int block_dim, int patch, std::uint64_t seed) {
  Encoder enc(num_blocks, block_dim, patch);
  Rng rng = make_rng(seed, 0x57);
  const double scale = 1.0 / patch;
  // Row-major fill so the stream is independent of Eigen's storage order.
  for (Eigen::Index r = 0; r < enc.weights_.rows(); ++r) {
    for (Eigen::Index c = 0; c < enc.weights_.cols(); ++c) enc.weights_(r, c) = scale * normal(rng);
  }
  return enc;
}

void Encoder::validate() const {
  if (weights_.rows() != rows() || weights_.cols() != cols()) {
    throw ShapeError("encoder weights must be (K*d) x (p*p)");
  }
  if (!weights_.allFinite()) throw NumericError("encoder has non-finite weights");
}

DisplacementField DisplacementField::zeros(PositionGrid grid) {
  DisplacementField f;
  f.vectors.assign(grid.size(), Vec2{});
  f.grid = std::move(grid);
  return f;
}

DisplacementField DisplacementField::sample(const FlowField& flow, PositionGrid grid) {
  DisplacementField f;
  f.vectors.reserve(grid.size());
  for (const Pos& p : grid.positions) {
    if (p.x < 0 || p.y < 0 || p.x >= flow.width() || p.y >= flow.height()) {
      throw BoundsError("field sample position outside the flow field");
    }
    f.vectors.push_back(flow.at(p.x, p.y));
  }
  f.grid = std::move(grid);
  return f;
}

std::optional<Vec2> DisplacementField::find(Pos p) const {
  for (std::size_t i = 0; i < grid.positions.size(); ++i) {
    if (grid.positions[i] == p) return vectors[i];
  }
  return std::nullopt;
}

double DisplacementField::mean_distance(const DisplacementField& other) const {
  if (other.size() != size()) throw ShapeError("fields have different lattices");
  if (vectors.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    sum += std::hypot(vectors[i].dx - other.vectors[i].dx, vectors[i].dy - other.vectors[i].dy);
  }
  return sum / static_cast<double>(vectors.size());
}

DisplacementField round_to_grid(const DisplacementField& field, const DisplacementGrid& grid) {
  DisplacementField out = field;
  for (Vec2& v : out.vectors) v = grid.round(v);
  return out;
}

}  // namespace v1motion::model
