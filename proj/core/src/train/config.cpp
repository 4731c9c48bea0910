#include "v1motion/train/config.hpp"

#include <set>

#include "v1motion/common/error.hpp"

namespace v1motion::train {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (lambda_rot < 0.0 || lambda_rec < 0.0 || lambda_norm < 0.0) throw ConfigError("loss weights must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (num_steps < 0) throw ConfigError("num_steps must be >= 0");
  if (num_blocks < 1 || block_dim < 1) throw ConfigError("num_blocks and block_dim must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (loss_stride < 0) throw ConfigError("loss_stride must be >= 0");
  grid.validate();
  if (motion == model::MotionKind::NonParametricMixed) (void)model::mixing_support(support_radius, support_step);
}

std::vector<model::Pos> TrainConfig::support() const {
  if (motion == model::MotionKind::NonParametricMixed) return model::mixing_support(support_radius, support_step);
  return {{0, 0}};
}

// `threads` is a runtime setting and deliberately absent: artifacts must not
// depend on it.
nlohmann::json to_json(const TrainConfig& cfg) {
  return {
      {"learning_rate", cfg.learning_rate},
      {"beta1", cfg.beta1},
      {"beta2", cfg.beta2},
      {"epsilon", cfg.epsilon},
      {"lambda_rot", cfg.lambda_rot},
      {"lambda_rec", cfg.lambda_rec},
      {"lambda_norm", cfg.lambda_norm},
      {"batch_size", cfg.batch_size},
      {"num_steps", cfg.num_steps},
      {"seed", cfg.seed},
      {"motion", model::to_string(cfg.motion)},
      {"num_blocks", cfg.num_blocks},
      {"block_dim", cfg.block_dim},
      {"patch", cfg.grid.patch},
      {"stride", cfg.grid.stride},
      {"disp_lo", cfg.displacements.lo()},
      {"disp_hi", cfg.displacements.hi()},
      {"disp_step", cfg.displacements.step()},
      {"support_radius", cfg.support_radius},
      {"support_step", cfg.support_step},
      {"loss_stride", cfg.loss_stride},
  };
}

void update_from_json(TrainConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  static const std::set<std::string> known = {
      "learning_rate", "beta1",     "beta2",      "epsilon",    "lambda_rot",     "lambda_rec",
      "lambda_norm",   "batch_size", "num_steps", "seed",       "threads",        "motion",
      "num_blocks",    "block_dim", "patch",      "stride",     "disp_lo",        "disp_hi",
      "disp_step",     "support_radius", "support_step", "loss_stride"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown train config key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("learning_rate", cfg.learning_rate);
    get("beta1", cfg.beta1);
    get("beta2", cfg.beta2);
    get("epsilon", cfg.epsilon);
    get("lambda_rot", cfg.lambda_rot);
    get("lambda_rec", cfg.lambda_rec);
    get("lambda_norm", cfg.lambda_norm);
    get("batch_size", cfg.batch_size);
    get("num_steps", cfg.num_steps);
    get("seed", cfg.seed);
    get("threads", cfg.threads);
    get("num_blocks", cfg.num_blocks);
    get("block_dim", cfg.block_dim);
    get("patch", cfg.grid.patch);
    get("stride", cfg.grid.stride);
    get("support_radius", cfg.support_radius);
    get("support_step", cfg.support_step);
    get("loss_stride", cfg.loss_stride);
    if (j.contains("motion")) cfg.motion = model::motion_kind_from_string(j.at("motion").get<std::string>());
    double lo = cfg.displacements.lo();
    double hi = cfg.displacements.hi();
    double step = cfg.displacements.step();
    get("disp_lo", lo);
    get("disp_hi", hi);
    get("disp_step", step);
    cfg.displacements = model::DisplacementGrid(lo, hi, step);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid train config value: ") + e.what());
  }
  cfg.validate();
}

}  // namespace v1motion::train
