#include "v1motion/data/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "v1motion/common/error.hpp"
#include "v1motion/common/parallel.hpp"
#include "v1motion/common/rng.hpp"
#include "v1motion/data/spline.hpp"

namespace v1motion::data {

namespace {

// Smooth random field with lattice spacing `cell`, Catmull-Rom interpolated.
void add_octave(model::Image& image, int cell, double amplitude, Rng& rng) {
  const int w = image.width();
  const int h = image.height();
  const int nx = w / cell + 6;
  const int ny = h / cell + 6;
  std::vector<double> lattice(static_cast<std::size_t>(nx) * ny);
  for (double& v : lattice) v = uniform(rng, -1.0, 1.0);
  const double ox = uniform(rng, 0.0, cell);
  const double oy = uniform(rng, 0.0, cell);
  auto at = [&](int i, int j) { return lattice[static_cast<std::size_t>(j) * nx + i]; };
  for (int y = 0; y < h; ++y) {
    const double v = (y + oy) / cell + 1.0;
    const int j = static_cast<int>(v);
    const double ty = v - j;
    for (int x = 0; x < w; ++x) {
      const double u = (x + ox) / cell + 1.0;
      const int i = static_cast<int>(u);
      const double tx = u - i;
      double rows[4];
      for (int r = 0; r < 4; ++r)
        rows[r] = catmull_rom(at(i - 1, j - 1 + r), at(i, j - 1 + r), at(i + 1, j - 1 + r), at(i + 2, j - 1 + r), tx);
      image.at(x, y) += amplitude * catmull_rom(rows[0], rows[1], rows[2], rows[3], ty);
    }
  }
}

// Coverage of a pixel by a shape given the signed distance (negative inside),
// with a one-pixel linear ramp.
double coverage(double signed_distance) { return std::clamp(0.5 - signed_distance, 0.0, 1.0); }

double shape_distance(int kind, double x, double y, double cx, double cy, double a, double b, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double u = (x - cx) * c + (y - cy) * s;
  const double v = -(x - cx) * s + (y - cy) * c;
  if (kind == 0) {
    // Approximate ellipse distance, exact for circles.
    const double r = std::hypot(u / a, v / b);
    return (r - 1.0) * std::min(a, b);
  }
  return std::max(std::abs(u) - a, std::abs(v) - b);
}

void rescale(model::Image& image, double lo, double hi) {
  const auto [mn, mx] = std::minmax_element(image.samples().begin(), image.samples().end());
  const double a = *mn;
  const double range = *mx - a;
  for (double& v : image.samples()) v = range > 0.0 ? lo + (hi - lo) * (v - a) / range : 0.5 * (lo + hi);
}

}  // namespace

model::Image procedural_image(int width, int height, std::uint64_t seed) {
  if (width < 1 || height < 1) throw ShapeError("procedural_image needs positive dimensions");
  Rng rng = make_rng(seed, 0);
  model::Image image(width, height);
  for (int cell = 32; cell >= 2; cell /= 2) add_octave(image, cell, cell / 32.0, rng);

  const int shapes = 2 + static_cast<int>(uniform_index(rng, 5));
  const double extent = std::max(width, height);
  for (int n = 0; n < shapes; ++n) {
    const int kind = static_cast<int>(uniform_index(rng, 2));
    const double cx = uniform(rng, 0.0, width);
    const double cy = uniform(rng, 0.0, height);
    const double a = uniform(rng, 0.05, 0.3) * extent;
    const double b = uniform(rng, 0.05, 0.3) * extent;
    const double angle = uniform(rng, 0.0, std::numbers::pi);
    const double level = uniform(rng, -1.2, 1.2);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double alpha = coverage(shape_distance(kind, x, y, cx, cy, a, b, angle));
        if (alpha > 0.0) image.at(x, y) = (1.0 - alpha) * image.at(x, y) + alpha * (level + 0.3 * image.at(x, y));
      }
    }
  }
  rescale(image, 0.05, 0.95);
  model::quantize_to_float(image);
  return image;
}

std::vector<model::Image> procedural_sources(std::size_t count, int width, int height, std::uint64_t seed,
                                             int threads) {
  std::vector<model::Image> out(count);
  parallel_for(count, threads, [&](std::size_t i) { out[i] = procedural_image(width, height, stream_seed(seed, i)); });
  return out;
}

ObjectLayer procedural_object(int width, int height, std::uint64_t seed) {
  Rng rng = make_rng(seed, 1);
  ObjectLayer layer{procedural_image(width, height, mix_seed(seed)), model::Image(width, height)};
  const int kind = static_cast<int>(uniform_index(rng, 2));
  const double cx = uniform(rng, 0.35, 0.65) * width;
  const double cy = uniform(rng, 0.35, 0.65) * height;
  const double a = uniform(rng, 0.12, 0.22) * width;
  const double b = uniform(rng, 0.12, 0.22) * height;
  const double angle = uniform(rng, 0.0, std::numbers::pi);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      layer.mask.at(x, y) = shape_distance(kind, x, y, cx, cy, a, b, angle) <= 0.0 ? 1.0 : 0.0;
  return layer;
}

}  // namespace v1motion::data
