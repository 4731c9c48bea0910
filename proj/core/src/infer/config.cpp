#include "v1motion/infer/config.hpp"

#include <set>

#include "v1motion/common/error.hpp"

namespace v1motion::infer {

void InferConfig::validate() const {
  if (margin < 0) throw ConfigError("margin must be >= 0");
  if (smoothness < 0.0) throw ConfigError("smoothness must be >= 0");
  if (!(step_size > 0.0)) throw ConfigError("step_size must be positive");
  if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

nlohmann::json to_json(const InferConfig& cfg) {
  return {{"margin", cfg.margin},       {"mixing", cfg.mixing},       {"smoothness", cfg.smoothness},
          {"step_size", cfg.step_size}, {"max_iterations", cfg.max_iterations}, {"tolerance", cfg.tolerance},
          {"seed", cfg.seed}};
}

void update_from_json(InferConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("infer config must be a JSON object");
  static const std::set<std::string> known = {"margin",         "mixing",    "smoothness", "step_size",
                                              "max_iterations", "tolerance", "seed",       "threads"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown infer config key '" + key + "'");
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("margin", cfg.margin);
    get("mixing", cfg.mixing);
    get("smoothness", cfg.smoothness);
    get("step_size", cfg.step_size);
    get("max_iterations", cfg.max_iterations);
    get("tolerance", cfg.tolerance);
    get("seed", cfg.seed);
    get("threads", cfg.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid infer config value: ") + e.what());
  }
  cfg.validate();
}

}  // namespace v1motion::infer
