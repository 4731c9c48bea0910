#include "v1motion/eval/flow_color.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "v1motion/common/error.hpp"

namespace v1motion::eval {

const std::vector<std::array<double, 3>>& color_wheel() {
  static const std::vector<std::array<double, 3>> wheel = [] {
    const int RY = 15, YG = 6, GC = 4, CB = 11, BM = 13, MR = 6;
    std::vector<std::array<double, 3>> w;
    for (int i = 0; i < RY; ++i) w.push_back({255.0, std::floor(255.0 * i / RY), 0.0});
    for (int i = 0; i < YG; ++i) w.push_back({255.0 - std::floor(255.0 * i / YG), 255.0, 0.0});
    for (int i = 0; i < GC; ++i) w.push_back({0.0, 255.0, std::floor(255.0 * i / GC)});
    for (int i = 0; i < CB; ++i) w.push_back({0.0, 255.0 - std::floor(255.0 * i / CB), 255.0});
    for (int i = 0; i < BM; ++i) w.push_back({std::floor(255.0 * i / BM), 0.0, 255.0});
    for (int i = 0; i < MR; ++i) w.push_back({255.0, 0.0, 255.0 - std::floor(255.0 * i / MR)});
    return w;
  }();
  return wheel;
}

std::array<double, 3> flow_color(double u, double v) {
  const auto& wheel = color_wheel();
  const int ncols = static_cast<int>(wheel.size());
  const double rad = std::sqrt(u * u + v * v);
  const double a = std::atan2(-v, -u) / std::numbers::pi;
  const double fk = (a + 1.0) / 2.0 * (ncols - 1);
  const int k0 = static_cast<int>(std::floor(fk));
  const int k1 = (k0 + 1) % ncols;
  const double f = fk - k0;
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const double col0 = wheel[static_cast<std::size_t>(k0)][static_cast<std::size_t>(c)] / 255.0;
    const double col1 = wheel[static_cast<std::size_t>(k1)][static_cast<std::size_t>(c)] / 255.0;
    double col = (1.0 - f) * col0 + f * col1;
    if (rad <= 1.0) col = 1.0 - rad * (1.0 - col);
    else col *= 0.75;
    out[static_cast<std::size_t>(c)] = col;
  }
  return out;
}

ColorImage flow_to_color(const model::FlowField& flow, std::optional<double> max_magnitude) {
  double maxrad = 0.0;
  if (max_magnitude) {
    if (!(*max_magnitude >= 0.0)) throw ConfigError("max_magnitude must be >= 0");
    maxrad = *max_magnitude;
  } else {
    for (int y = 0; y < flow.height(); ++y)
      for (int x = 0; x < flow.width(); ++x) {
        const auto d = flow.at(x, y);
        if (!std::isfinite(d.dx) || !std::isfinite(d.dy)) throw NumericError("flow field has non-finite values");
        maxrad = std::max(maxrad, std::hypot(d.dx, d.dy));
      }
  }
  ColorImage img{flow.width(), flow.height(), {}};
  img.rgb.reserve(static_cast<std::size_t>(flow.width()) * flow.height() * 3);
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const auto d = flow.at(x, y);
      std::array<double, 3> c{1.0, 1.0, 1.0};
      if (maxrad > 0.0) c = flow_color(d.dx / maxrad, d.dy / maxrad);
      for (double v : c) img.rgb.push_back(static_cast<std::uint8_t>(std::floor(255.0 * std::clamp(v, 0.0, 1.0))));
    }
  }
  return img;
}

model::FlowField expand_field(const model::DisplacementField& field, int width, int height, int stride) {
  if (stride < 1) throw ConfigError("stride must be >= 1");
  model::FlowField out(width, height);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const auto p = field.positions()[i];
    const int x0 = p.x - stride / 2;
    const int y0 = p.y - stride / 2;
    for (int y = std::max(0, y0); y < std::min(height, y0 + stride); ++y)
      for (int x = std::max(0, x0); x < std::min(width, x0 + stride); ++x) out.set(x, y, field.vectors[i]);
  }
  return out;
}

}  // namespace v1motion::eval
