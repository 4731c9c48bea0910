#pragma once

#include <cstdint>
#include <vector>

#include "v1motion/model/image.hpp"

namespace v1motion::data {

/// Natural-looking grayscale texture: 1/f value noise plus a few hard-edged
/// shapes, rescaled to [0.05, 0.95] and rounded to float32.
model::Image procedural_image(int width, int height, std::uint64_t seed);

/// `count` images, image i drawn from stream (seed, i).
std::vector<model::Image> procedural_sources(std::size_t count, int width, int height, std::uint64_t seed,
                                             int threads = 1);

/// Textured foreground with a binary mask (1 inside the object).
struct ObjectLayer {
  model::Image texture;
  model::Image mask;
};

/// Ellipse or polygon-like blob roughly a quarter of the frame wide.
ObjectLayer procedural_object(int width, int height, std::uint64_t seed);

}  // namespace v1motion::data
