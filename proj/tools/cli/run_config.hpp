#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>

#include "v1motion/data/dataset_io.hpp"
#include "v1motion/data/generators.hpp"
#include "v1motion/data/preprocess.hpp"
#include "v1motion/infer/config.hpp"
#include "v1motion/train/config.hpp"
#include "v1motion/train/unsupervised.hpp"

namespace v1motion::cli {

inline constexpr int kSchemaVersion = 1;

struct DataSection {
  std::string kind = "v1deform";  ///< "v1deform" or "translation"
  std::size_t count = 2000;
  std::size_t sources = 200;
  int source_size = 96;
  int width = 64;
  int height = 64;
  int control = 4;
  double lo = -6.0;
  double hi = 6.0;
  int max_shift = 3;
  data::ImageMode image_mode = data::ImageMode::Float32;
};

struct ObjectsSection {
  std::size_t count = 2000;
  std::size_t backgrounds = 200;
  std::size_t objects = 50;
  data::AffineSceneSpec scene;
};

struct InterpolateSection {
  int max_steps = 10;
  double threshold = 10.0 / 255.0;
  std::size_t save_frames = 0;  ///< write the frames of this many pairs
};

struct AnalysisSection {
  double min_r2 = 0.5;
  int max_iterations = 200;
  int columns = 20;
};

/// Everything a subcommand needs. Sub-seeds are derived from `seed` in `finalize`.
struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 1;
  data::Preprocess preprocess = data::Preprocess::None;
  data::Preprocess unsup_preprocess = data::Preprocess::None;
  DataSection data;
  ObjectsSection objects;
  data::SequenceSpec sequence;
  train::TrainConfig train;
  train::UnsupervisedConfig unsup;
  infer::InferConfig infer;
  InterpolateSection interpolate;
  AnalysisSection analysis;
  int eval_margin = 8;

  /// Propagates the global seed and thread count into every section and validates.
  void finalize();
};

RunConfig defaults();
void apply_desk_scale(RunConfig& cfg);

/// Merges a JSON document into `cfg`. Unknown keys throw ConfigError.
void update_from_json(RunConfig& cfg, const nlohmann::json& j);

/// Applies a `section.key=value` override; the value is parsed as JSON, falling back to a string.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Canonical form used for hashing. `threads` is omitted.
nlohmann::json to_json(const RunConfig& cfg);

std::uint64_t fnv1a(const std::string& bytes);
std::string config_hash(const RunConfig& cfg);

nlohmann::json load_json_file(const std::string& path);

}  // namespace v1motion::cli
