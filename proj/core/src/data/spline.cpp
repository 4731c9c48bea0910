#include "v1motion/data/spline.hpp"

#include <algorithm>
#include <cmath>

#include "v1motion/common/error.hpp"

namespace v1motion::data {

ControlGrid ControlGrid::constant(int m, model::Vec2 value) {
  const auto n = static_cast<std::size_t>(m) * m;
  return {m, std::vector<double>(n, value.dx), std::vector<double>(n, value.dy)};
}

void ControlGrid::validate() const {
  if (m < 2) throw ConfigError("control grid needs m >= 2");
  const auto n = static_cast<std::size_t>(m) * m;
  if (dx.size() != n || dy.size() != n) throw ShapeError("control grid holds m*m values per component");
}

double catmull_rom(double p0, double p1, double p2, double p3, double t) {
  const double a = 2.0 * p1;
  const double b = p2 - p0;
  const double c = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
  const double d = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
  return 0.5 * (a + t * (b + t * (c + t * d)));
}

namespace {

struct Segment {
  int index[4];
  double t;
};

// Control segment and local parameter for pixel coordinate `x`.
Segment locate(int x, int extent, int m) {
  const double u = extent > 1 ? static_cast<double>(x) * (m - 1) / (extent - 1) : 0.0;
  int i = std::min(static_cast<int>(std::floor(u)), m - 2);
  const double t = u - i;
  Segment s{};
  for (int o = 0; o < 4; ++o) s.index[o] = std::clamp(i - 1 + o, 0, m - 1);
  s.t = t;
  return s;
}

}  // namespace

model::FlowField interpolate_field(const ControlGrid& controls, int width, int height, double lo, double hi) {
  controls.validate();
  if (!(lo <= hi)) throw ConfigError("interpolate_field needs lo <= hi");
  const int m = controls.m;
  model::FlowField out(width, height);

  std::vector<Segment> xs(static_cast<std::size_t>(width));
  for (int x = 0; x < width; ++x) xs[static_cast<std::size_t>(x)] = locate(x, width, m);

  for (int y = 0; y < height; ++y) {
    const Segment sy = locate(y, height, m);
    for (int x = 0; x < width; ++x) {
      const Segment& sx = xs[static_cast<std::size_t>(x)];
      double comp[2];
      for (int c = 0; c < 2; ++c) {
        const auto& values = c == 0 ? controls.dx : controls.dy;
        double rows[4];
        for (int r = 0; r < 4; ++r) {
          const std::size_t base = static_cast<std::size_t>(sy.index[r]) * m;
          rows[r] = catmull_rom(values[base + sx.index[0]], values[base + sx.index[1]], values[base + sx.index[2]],
                                values[base + sx.index[3]], sx.t);
        }
        comp[c] = std::clamp(catmull_rom(rows[0], rows[1], rows[2], rows[3], sy.t), lo, hi);
      }
      out.set(x, y, {comp[0], comp[1]});
    }
  }
  return out;
}

}  // namespace v1motion::data
