#include "run_config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "v1motion/common/error.hpp"
#include "v1motion/common/rng.hpp"

namespace v1motion::cli {

namespace {

using Setter = std::function<void(const nlohmann::json&)>;

template <class T>
Setter set(T& field) {
  return [&field](const nlohmann::json& v) { field = v.get<T>(); };
}

void apply_keys(const nlohmann::json& j, const std::string& section, const std::map<std::string, Setter>& keys) {
  if (!j.is_object()) throw ConfigError("config section '" + section + "' must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError("unknown config key '" + section + key + "'");
    try {
      it->second(value);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("invalid value for '" + section + key + "': " + e.what());
    }
  }
}

// Seeds and thread counts come from the top level only.
void reject_runtime_keys(const nlohmann::json& j, const std::string& section) {
  if (!j.is_object()) return;
  for (const char* key : {"seed", "threads"})
    if (j.contains(key)) throw ConfigError("'" + section + key + "' is set from the top-level '" + key + "'");
}

data::ImageMode image_mode_from_string(const std::string& s) {
  if (s == "float32") return data::ImageMode::Float32;
  if (s == "pgm") return data::ImageMode::Pgm;
  throw ConfigError("unknown image_mode '" + s + "' (expected float32 or pgm)");
}

std::string to_string(data::ImageMode m) { return m == data::ImageMode::Pgm ? "pgm" : "float32"; }

}  // namespace

RunConfig defaults() {
  RunConfig cfg;
  cfg.unsup.train.motion = model::MotionKind::Parametric;
  cfg.unsup.train.grid = {8, 4};
  cfg.finalize();
  return cfg;
}

// Small settings that finish on one core in minutes; the acceptance runs use the same numbers.
void apply_desk_scale(RunConfig& cfg) {
  cfg.preprocess = data::Preprocess::Bandpass;
  cfg.unsup_preprocess = data::Preprocess::None;

  cfg.data.count = 2000;
  cfg.data.sources = 200;
  cfg.data.source_size = 96;
  cfg.data.width = 64;
  cfg.data.height = 64;
  cfg.data.lo = -3.0;
  cfg.data.hi = 3.0;

  cfg.train.motion = model::MotionKind::NonParametricMixed;
  cfg.train.num_blocks = 40;
  cfg.train.block_dim = 2;
  cfg.train.grid = {16, 8};
  cfg.train.displacements = model::DisplacementGrid(-3.0, 3.0, 0.5);
  cfg.train.learning_rate = 0.01;
  cfg.train.num_steps = 1000;

  cfg.infer.margin = 8;
  cfg.infer.mixing = true;

  cfg.unsup.train.motion = model::MotionKind::Parametric;
  cfg.unsup.train.num_blocks = 40;
  cfg.unsup.train.grid = {8, 4};
  cfg.unsup.train.displacements = model::DisplacementGrid(-3.0, 3.0, 0.5);
  cfg.unsup.train.learning_rate = 0.003;
  cfg.unsup.init_steps = 500;
  cfg.unsup.rounds = 5;
  cfg.unsup.steps_per_round = 100;
  cfg.unsup.infer.smoothness = 0.1;
  cfg.unsup.infer.margin = 8;

  cfg.sequence.frames = 30;
  cfg.eval_margin = 8;
}

void RunConfig::finalize() {
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (data.kind != "v1deform" && data.kind != "translation")
    throw ConfigError("data.kind must be v1deform or translation");
  if (data.sources < 1 || data.source_size < 1) throw ConfigError("data.sources and data.source_size must be >= 1");
  if (data.source_size < data.width || data.source_size < data.height)
    throw ConfigError("data.source_size must cover the image size");
  if (objects.backgrounds < 1) throw ConfigError("objects.backgrounds must be >= 1");
  if (sequence.frames < 2) throw ConfigError("sequence.frames must be >= 2");
  if (interpolate.max_steps < 0 || !(interpolate.threshold >= 0.0))
    throw ConfigError("interpolate.max_steps and interpolate.threshold must be >= 0");
  if (analysis.columns < 1 || analysis.max_iterations < 1) throw ConfigError("analysis.columns and max_iterations must be >= 1");
  if (eval_margin < 0) throw ConfigError("eval.margin must be >= 0");

  objects.scene.seed = stream_seed(seed, 5);
  objects.scene.validate();
  sequence.seed = stream_seed(seed, 6);
  train.seed = stream_seed(seed, 7);
  train.threads = threads;
  infer.seed = stream_seed(seed, 8);
  infer.threads = threads;
  unsup.train.seed = stream_seed(seed, 9);
  unsup.train.threads = threads;
  unsup.infer.seed = stream_seed(seed, 10);
  unsup.infer.threads = threads;
  train.validate();
  infer.validate();
  unsup.validate();
}

void update_from_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "schema_version") {
        if (value.get<int>() != kSchemaVersion)
          throw VersionError("config schema_version " + value.dump() + " is not supported (expected " +
                             std::to_string(kSchemaVersion) + ")");
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "threads") {
        cfg.threads = value.get<int>();
      } else if (key == "preprocess") {
        cfg.preprocess = data::preprocess_from_string(value.get<std::string>());
      } else if (key == "data") {
        auto& d = cfg.data;
        apply_keys(value, "data.",
                   {{"kind", set(d.kind)},
                    {"count", set(d.count)},
                    {"sources", set(d.sources)},
                    {"source_size", set(d.source_size)},
                    {"width", set(d.width)},
                    {"height", set(d.height)},
                    {"control", set(d.control)},
                    {"lo", set(d.lo)},
                    {"hi", set(d.hi)},
                    {"max_shift", set(d.max_shift)},
                    {"image_mode", [&d](const nlohmann::json& v) {
                       d.image_mode = image_mode_from_string(v.get<std::string>());
                     }}});
      } else if (key == "objects") {
        auto& o = cfg.objects;
        auto& s = o.scene;
        apply_keys(value, "objects.",
                   {{"count", set(o.count)},
                    {"backgrounds", set(o.backgrounds)},
                    {"objects", set(o.objects)},
                    {"width", set(s.width)},
                    {"height", set(s.height)},
                    {"max_translation", set(s.max_translation)},
                    {"max_rotation", set(s.max_rotation)},
                    {"max_log_scale", set(s.max_log_scale)},
                    {"fg_max_translation", set(s.fg_max_translation)},
                    {"fg_max_rotation", set(s.fg_max_rotation)},
                    {"fg_max_log_scale", set(s.fg_max_log_scale)},
                    {"max_displacement", set(s.max_displacement)},
                    {"max_retries", set(s.max_retries)}});
      } else if (key == "sequence") {
        auto& s = cfg.sequence;
        apply_keys(value, "sequence.",
                   {{"width", set(s.width)},
                    {"height", set(s.height)},
                    {"frames", set(s.frames)},
                    {"vx", set(s.vx)},
                    {"vy", set(s.vy)},
                    {"rotation", set(s.rotation)},
                    {"log_scale", set(s.log_scale)}});
      } else if (key == "train") {
        reject_runtime_keys(value, "train.");
        train::update_from_json(cfg.train, value);
      } else if (key == "infer") {
        reject_runtime_keys(value, "infer.");
        infer::update_from_json(cfg.infer, value);
      } else if (key == "unsupervised") {
        nlohmann::json rest = value;
        if (rest.is_object() && rest.contains("preprocess")) {
          cfg.unsup_preprocess = data::preprocess_from_string(rest.at("preprocess").get<std::string>());
          rest.erase("preprocess");
        }
        reject_runtime_keys(rest, "unsupervised.");
        if (rest.is_object()) {
          if (rest.contains("train")) reject_runtime_keys(rest.at("train"), "unsupervised.train.");
          if (rest.contains("infer")) reject_runtime_keys(rest.at("infer"), "unsupervised.infer.");
        }
        train::update_from_json(cfg.unsup, rest);
      } else if (key == "interpolate") {
        auto& s = cfg.interpolate;
        apply_keys(value, "interpolate.",
                   {{"max_steps", set(s.max_steps)},
                    {"threshold", set(s.threshold)},
                    {"save_frames", set(s.save_frames)}});
      } else if (key == "analysis") {
        auto& s = cfg.analysis;
        apply_keys(value, "analysis.",
                   {{"min_r2", set(s.min_r2)}, {"max_iterations", set(s.max_iterations)}, {"columns", set(s.columns)}});
      } else if (key == "eval") {
        apply_keys(value, "eval.", {{"margin", set(cfg.eval_margin)}});
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("invalid value for '" + key + "': " + e.what());
    }
  }
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  nlohmann::json doc = value;
  std::size_t end = path.size();
  while (true) {
    const auto dot = path.rfind('.', end - 1);
    const std::string part = dot == std::string::npos ? path.substr(0, end) : path.substr(dot + 1, end - dot - 1);
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    doc = nlohmann::json{{part, doc}};
    if (dot == std::string::npos) break;
    end = dot;
  }
  update_from_json(cfg, doc);
}

nlohmann::json to_json(const RunConfig& cfg) {
  const auto& d = cfg.data;
  nlohmann::json objects = data::to_json(cfg.objects.scene);
  objects.erase("generator");
  objects.erase("seed");
  objects["count"] = cfg.objects.count;
  objects["backgrounds"] = cfg.objects.backgrounds;
  objects["objects"] = cfg.objects.objects;
  const auto& s = cfg.sequence;
  // Section seeds derive from the top-level seed, so they are not echoed.
  nlohmann::json train = train::to_json(cfg.train);
  train.erase("seed");
  nlohmann::json infer = infer::to_json(cfg.infer);
  infer.erase("seed");
  nlohmann::json unsup = train::to_json(cfg.unsup);
  unsup["train"].erase("seed");
  unsup["infer"].erase("seed");
  unsup["preprocess"] = data::to_string(cfg.unsup_preprocess);
  return {
      {"schema_version", kSchemaVersion},
      {"seed", cfg.seed},
      {"preprocess", data::to_string(cfg.preprocess)},
      {"data",
       {{"kind", d.kind},
        {"count", d.count},
        {"sources", d.sources},
        {"source_size", d.source_size},
        {"width", d.width},
        {"height", d.height},
        {"control", d.control},
        {"lo", d.lo},
        {"hi", d.hi},
        {"max_shift", d.max_shift},
        {"image_mode", to_string(d.image_mode)}}},
      {"objects", objects},
      {"sequence",
       {{"width", s.width},
        {"height", s.height},
        {"frames", s.frames},
        {"vx", s.vx},
        {"vy", s.vy},
        {"rotation", s.rotation},
        {"log_scale", s.log_scale}}},
      {"train", train},
      {"infer", infer},
      {"unsupervised", unsup},
      {"interpolate",
       {{"max_steps", cfg.interpolate.max_steps},
        {"threshold", cfg.interpolate.threshold},
        {"save_frames", cfg.interpolate.save_frames}}},
      {"analysis",
       {{"min_r2", cfg.analysis.min_r2},
        {"max_iterations", cfg.analysis.max_iterations},
        {"columns", cfg.analysis.columns}}},
      {"eval", {{"margin", cfg.eval_margin}}},
  };
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(cfg).dump())));
  return buf;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config " + path + " is not valid JSON");
  return j;
}

}  // namespace v1motion::cli
