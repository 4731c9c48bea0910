#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "v1motion/model/field.hpp"
#include "v1motion/model/image.hpp"

namespace v1motion::eval {

struct EpeReport {
  double mean = 0.0;
  std::vector<model::Pos> positions;  ///< evaluated positions
  std::vector<double> errors;         ///< endpoint error per evaluated position
  std::size_t count = 0;
  int margin = 0;
};

/// Mean endpoint error over prediction positions whose coordinates lie in
/// [margin, extent - 1 - margin]. Ground truth is read at each prediction
/// position. Throws ConfigError if no position survives the margin.
EpeReport epe(const model::DisplacementField& pred, const model::FlowField& truth, int margin = 8);

/// Same against a lattice field on the same positions; the extent is
/// `width` x `height`.
EpeReport epe(const model::DisplacementField& pred, const model::DisplacementField& truth, int width, int height,
              int margin = 8);

struct EpeSummary {
  double pooled = 0.0;     ///< mean over all positions of all images
  double per_image = 0.0;  ///< mean of the per-image means
  std::size_t images = 0;
  std::size_t positions = 0;
};

EpeSummary summarize(std::span<const EpeReport> reports);

/// One row per image (index, count, mean) followed by pooled and per-image
/// summary rows.
void write_epe_csv(const std::filesystem::path& path, std::span<const EpeReport> reports);

}  // namespace v1motion::eval
