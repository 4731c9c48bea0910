#pragma once

#include <filesystem>

#include "v1motion/model/field.hpp"

namespace v1motion::infer {

inline constexpr std::uint32_t kFieldVersion = 1;

/// A lattice field together with the size of the image it belongs to.
struct FieldFile {
  model::DisplacementField field;
  int width = 0;
  int height = 0;
};

/// Binary layout: "V1FD", u32 version, u32 nx, ny, width, height,
/// i32 x0, y0, step, then the dx and dy planes as float32 (row-major).
/// The lattice must be regular.
void write_field(const std::filesystem::path& path, const FieldFile& file);
FieldFile read_field(const std::filesystem::path& path);

/// One "x y dx dy" line per position.
void write_field_text(const std::filesystem::path& path, const model::DisplacementField& field);

}  // namespace v1motion::infer
