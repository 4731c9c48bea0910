#pragma once

#include <optional>
#include <vector>

#include "v1motion/model/grid.hpp"
#include "v1motion/model/image.hpp"

namespace v1motion::model {

/// Displacements sampled on a lattice of positions (normally D- or a subset).
struct DisplacementField {
  PositionGrid grid;
  std::vector<Vec2> vectors;

  std::size_t size() const { return vectors.size(); }
  const std::vector<Pos>& positions() const { return grid.positions; }

  /// Zero field on `grid`.
  static DisplacementField zeros(PositionGrid grid);

  /// Samples a per-pixel field at every position of `grid`.
  static DisplacementField sample(const FlowField& flow, PositionGrid grid);

  /// Vector at position `p`, if `p` is one of the lattice positions.
  std::optional<Vec2> find(Pos p) const;

  /// Mean Euclidean distance to another field on the same lattice.
  double mean_distance(const DisplacementField& other) const;
};

/// Rounds each vector to its nearest candidate.
DisplacementField round_to_grid(const DisplacementField& field, const DisplacementGrid& grid);

}  // namespace v1motion::model
