#pragma once

#include <filesystem>

#include "v1motion/data/sample.hpp"

namespace v1motion::data {

inline constexpr std::uint32_t kDatasetVersion = 1;

enum class ImageMode {
  Float32,  ///< images stored in the sample files (lossless for float32 data)
  Pgm,      ///< images stored as 8-bit PGM files next to the sample files
};

/// Writes manifest.json plus one sample file per pair into `dir`
/// (created if missing).
void write_dataset(const Dataset& data, const std::filesystem::path& dir, ImageMode mode = ImageMode::Float32);

/// Reads a dataset directory. Throws IoError for missing files, FormatError
/// for malformed contents and VersionError for a foreign version.
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace v1motion::data
