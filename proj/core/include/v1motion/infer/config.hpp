#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>

namespace v1motion::infer {

struct InferConfig {
  /// Positions closer than this to the image border are not inferred.
  int margin = 8;
  /// Use the full mixing support of a mixed model; when false only the
  /// zero-offset matrices take part.
  bool mixing = true;
  /// Weight of the squared forward-difference smoothness penalty (parametric).
  double smoothness = 0.0;
  /// Initial gradient-descent step (parametric); adapted by backtracking.
  double step_size = 0.05;
  int max_iterations = 300;
  /// Stop once the mean per-position update falls below this many pixels.
  double tolerance = 1e-4;
  /// Seed of the random initial field (parametric).
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

nlohmann::json to_json(const InferConfig& cfg);
void update_from_json(InferConfig& cfg, const nlohmann::json& j);

}  // namespace v1motion::infer
