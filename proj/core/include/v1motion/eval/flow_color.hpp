#pragma once

#include <array>
#include <optional>
#include <vector>

#include "v1motion/eval/pnm.hpp"
#include "v1motion/model/field.hpp"
#include "v1motion/model/image.hpp"

namespace v1motion::eval {

/// Middlebury color wheel: 55 hues (red-yellow 15, yellow-green 6,
/// green-cyan 4, cyan-blue 11, blue-magenta 13, magenta-red 6), 0..255.
const std::vector<std::array<double, 3>>& color_wheel();

/// Color of one displacement with magnitude already divided by the
/// normalization radius, as [0, 1] floats before quantization. Zero is white.
std::array<double, 3> flow_color(double u, double v);

/// Colors every pixel; magnitudes are divided by `max_magnitude` or, when
/// absent, by the largest magnitude in the field. An all-zero field is white.
ColorImage flow_to_color(const model::FlowField& flow, std::optional<double> max_magnitude = std::nullopt);

/// Lattice field painted as constant stride x stride blocks around each
/// position, zero elsewhere.
model::FlowField expand_field(const model::DisplacementField& field, int width, int height, int stride);

}  // namespace v1motion::eval
