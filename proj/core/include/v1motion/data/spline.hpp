#pragma once

#include <vector>

#include "v1motion/model/image.hpp"

namespace v1motion::data {

/// Control displacements on an m x m grid, row-major (y outer).
/// Control (i, j) sits at pixel (j * (W-1)/(m-1), i * (H-1)/(m-1)), so the
/// outer controls coincide with the image corners.
struct ControlGrid {
  int m = 4;
  std::vector<double> dx;
  std::vector<double> dy;

  static ControlGrid constant(int m, model::Vec2 value);
  void validate() const;
};

/// Catmull-Rom segment through p1 (t = 0) and p2 (t = 1).
double catmull_rom(double p0, double p1, double p2, double p3, double t);

/// Per-pixel field from separable Catmull-Rom interpolation of each
/// component. End segments reuse the edge control as the missing neighbor.
/// Results are clamped to [lo, hi].
model::FlowField interpolate_field(const ControlGrid& controls, int width, int height, double lo, double hi);

}  // namespace v1motion::data
