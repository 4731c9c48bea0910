#include "v1motion/model/image.hpp"

#include <cmath>
#include <string>

#include "v1motion/common/error.hpp"

namespace v1motion::model {

namespace {

std::size_t checked_size(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw ShapeError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

Image::Image(int width, int height, double fill)
    : width_(width), height_(height), samples_(checked_size(width, height), fill) {}

Image::Image(int width, int height, std::vector<double> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (samples_.size() != checked_size(width, height)) {
    throw ShapeError("sample count does not match image dimensions");
  }
  for (double s : samples_) {
    if (!std::isfinite(s)) throw NumericError("image sample is not finite");
  }
}

FlowField::FlowField(int width, int height)
    : width_(width),
      height_(height),
      dx_(checked_size(width, height), 0.0),
      dy_(checked_size(width, height), 0.0) {}

Image luminance(int width, int height, const std::vector<unsigned char>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) {
    throw ShapeError("RGB buffer does not match image dimensions");
  }
  Image out(width, height);
  auto& s = out.samples();
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = (0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] + 0.114 * rgb[3 * i + 2]) / 255.0;
  }
  return out;
}

void quantize_to_float(Image& image) {
  for (double& s : image.samples()) s = static_cast<double>(static_cast<float>(s));
}

void quantize_to_float(FlowField& field) {
  for (double& s : field.dx_plane()) s = static_cast<double>(static_cast<float>(s));
  for (double& s : field.dy_plane()) s = static_cast<double>(static_cast<float>(s));
}

}  // namespace v1motion::model
