#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "v1motion/model/image.hpp"

namespace v1motion::eval {

/// Interleaved 8-bit RGB raster.
struct ColorImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  friend bool operator==(const ColorImage&, const ColorImage&) = default;
};

/// round(clamp(v, 0, 1) * 255).
std::uint8_t quantize_sample(double v);

/// Binary PGM (P5, maxval 255) from a [0, 1] image.
std::vector<std::uint8_t> encode_pgm(const model::Image& image);
model::Image decode_pgm(const std::vector<std::uint8_t>& bytes);
/// Binary PPM (P6, maxval 255).
std::vector<std::uint8_t> encode_ppm(const ColorImage& image);
ColorImage decode_ppm(const std::vector<std::uint8_t>& bytes);

void write_pgm(const std::filesystem::path& path, const model::Image& image);
model::Image read_pgm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const ColorImage& image);
ColorImage read_ppm(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

/// Linear map of [lo, hi] to [0, 1] for display; a flat image maps to 0.5.
model::Image normalize_for_display(const model::Image& image);

}  // namespace v1motion::eval
