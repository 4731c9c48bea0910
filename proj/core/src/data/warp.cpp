#include "v1motion/data/warp.hpp"

#include <algorithm>
#include <cmath>

#include "v1motion/common/error.hpp"

namespace v1motion::data {

double bilinear_sample(const model::Image& image, double x, double y) {
  const int w = image.width();
  const int h = image.height();
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * image.at(x0, y0) + fx * image.at(x1, y0);
  const double bottom = (1.0 - fx) * image.at(x0, y1) + fx * image.at(x1, y1);
  return (1.0 - fy) * top + fy * bottom;
}

model::Image warp(const model::Image& image, const model::FlowField& flow) {
  if (flow.width() != image.width() || flow.height() != image.height())
    throw ShapeError("warp: field and image sizes differ");
  model::Image out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const model::Vec2 d = flow.at(x, y);
      out.at(x, y) = bilinear_sample(image, x - d.dx, y - d.dy);
    }
  }
  return out;
}

}  // namespace v1motion::data
