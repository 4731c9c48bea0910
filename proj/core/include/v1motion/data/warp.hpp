#pragma once

#include "v1motion/model/image.hpp"

namespace v1motion::data {

/// Bilinear interpolation at (x, y); coordinates are clamped to the image
/// first, so samples outside repeat the border pixel.
double bilinear_sample(const model::Image& image, double x, double y);

/// Backward warp: out(x) = image(x - delta(x)).
model::Image warp(const model::Image& image, const model::FlowField& flow);

}  // namespace v1motion::data
