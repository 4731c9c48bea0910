#pragma once

#include <cstddef>
#include <vector>

#include "v1motion/model/image.hpp"

namespace v1motion::model {

/// A rectangular lattice of positions, stored row-major (`nx` per row).
struct PositionGrid {
  std::vector<Pos> positions;
  int nx = 0;
  int ny = 0;

  std::size_t size() const { return positions.size(); }
};

/// Patch geometry and the sub-sampled position set D-.
///
/// A patch of size p centered at x spans [x - p/2, x - p/2 + p) on each
/// axis, so a 16x16 patch at x covers offsets -8..+7.
struct GridSpec {
  int patch = 16;
  int stride = 8;

  void validate() const;

  /// First pixel of the window centered at `center`.
  int window_start(int center) const { return center - patch / 2; }
  /// Smallest and largest center coordinate whose window fits in `extent`.
  int min_center() const { return patch / 2; }
  int max_center(int extent) const { return extent - patch + patch / 2; }
  bool fits(Pos x, int width, int height) const {
    return x.x >= min_center() && x.y >= min_center() && x.x <= max_center(width) &&
           x.y <= max_center(height);
  }

  /// All stride-sampled centers whose full patch lies inside the image.
  PositionGrid positions(int width, int height) const;

  /// Subset of `positions` that additionally leaves room for a mixing
  /// support of Chebyshev radius `support_radius` and keeps at least
  /// `margin` pixels to each image border (pixel coordinates in
  /// [margin, extent - 1 - margin]).
  PositionGrid interior_positions(int width, int height, int support_radius, int margin) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Square grid of candidate displacements [lo, hi]^2 with spacing `step`.
///
/// Candidate index c = i * n + j encodes (lo + i*step, lo + j*step), so index
/// order is lexicographic in (dx, dy).
class DisplacementGrid {
 public:
  DisplacementGrid() : DisplacementGrid(-6.0, 6.0, 0.5) {}
  DisplacementGrid(double lo, double hi, double step);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double step() const { return step_; }
  int per_axis() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  Vec2 candidate(std::size_t c) const;
  /// Exact lookup; throws LookupError for off-grid or out-of-range values.
  std::size_t index(Vec2 delta) const;
  /// Index of the nearest candidate, clamping to the range.
  std::size_t nearest(Vec2 delta) const;
  Vec2 round(Vec2 delta) const { return candidate(nearest(delta)); }

  /// Candidate indices ordered by (|delta|, dx, dy). Scanning in this order
  /// with a strict comparison resolves ties toward the smallest displacement.
  const std::vector<std::size_t>& search_order() const { return order_; }

  friend bool operator==(const DisplacementGrid& a, const DisplacementGrid& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.step_ == b.step_;
  }

 private:
  double lo_;
  double hi_;
  double step_;
  int n_;
  std::vector<std::size_t> order_;
};

/// Mixing support S: offsets {-radius, ..., radius}^2 sampled every `step`,
/// row-major (dy outer). radius 0 gives the singleton {(0,0)}.
std::vector<Pos> mixing_support(int radius, int step);

/// Chebyshev radius of a support set.
int support_radius(const std::vector<Pos>& support);

}  // namespace v1motion::model
