#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace v1motion::cli {

/// What a subcommand reports back for the run summary.
struct Outcome {
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<std::string> outputs;
  std::string summary_path;  ///< used unless --summary is given
};

struct GenDataArgs {
  std::string out;
};

struct GenObjectsArgs {
  std::string out;
};

struct TrainArgs {
  std::string data;
  std::string out;
  std::string history;  ///< optional loss CSV
};

struct TrainUnsupArgs {
  std::string frames;  ///< directory of PGM frames; empty means the synthetic sequence
  std::string out;
  std::string fields_dir;
};

struct InferArgs {
  std::string checkpoint;
  std::string data;
  std::string current;
  std::string next;
  std::string out;
  bool color = false;
};

struct AnimateArgs {
  std::string checkpoint;
  std::string image;
  std::vector<std::string> fields;
  std::string data;
  std::size_t pair = 0;
  int steps = 6;
  std::string out;
};

struct InterpolateArgs {
  std::string checkpoint;
  std::string data;
  std::string out;
  std::size_t limit = 0;  ///< 0 means every pair
};

struct AnalyzeArgs {
  std::string checkpoint;
  std::string out;
};

struct EvalArgs {
  std::string data;
  std::string fields;
  bool zero = false;
  std::string out;
  bool color = false;
};

struct FiltersArgs {
  std::string checkpoint;
  std::string out;
  int block = -1;  ///< -1 renders every sub-vector
  std::string path;
  double vx = 0.5;
  double vy = 0.0;
  int frames = 7;
};

Outcome run_gen_data(const RunConfig& cfg, const GenDataArgs& args);
Outcome run_gen_objects(const RunConfig& cfg, const GenObjectsArgs& args);
Outcome run_train(const RunConfig& cfg, const TrainArgs& args);
Outcome run_train_unsup(const RunConfig& cfg, const TrainUnsupArgs& args);
Outcome run_infer(const RunConfig& cfg, const InferArgs& args);
Outcome run_animate(const RunConfig& cfg, const AnimateArgs& args);
Outcome run_interpolate(const RunConfig& cfg, const InterpolateArgs& args);
Outcome run_analyze(const RunConfig& cfg, const AnalyzeArgs& args);
Outcome run_eval(const RunConfig& cfg, const EvalArgs& args);
Outcome run_filters(const RunConfig& cfg, const FiltersArgs& args);

}  // namespace v1motion::cli
