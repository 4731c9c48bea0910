// v1motion command-line tool.
//
// Exit codes:
//   0  success
//   1  unexpected internal error
//   2  bad command line or configuration
//   3  missing or unreadable input, unwritable output
//   4  malformed artifact or version mismatch
//   5  numerical failure (divergence, failed fit)
//   6  inputs that do not fit together (image sizes, model shapes, out-of-range candidates)

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "commands.hpp"
#include "run_config.hpp"
#include "v1motion/common/error.hpp"

namespace {

using namespace v1motion;
using namespace v1motion::cli;

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kIo = 3,
  kFormat = 4,
  kNumeric = 5,
  kMismatch = 6,
};

struct GlobalOptions {
  std::string config;
  bool desk_scale = false;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string summary;
};

void write_summary(const std::string& path, const nlohmann::json& summary) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write summary " + path);
  out << summary.dump(2) << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"Learn and apply coupled patch encodings and displacement operators on image pairs.", "v1motion"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");
  app.footer("Run 'v1motion SUBCOMMAND --help' for the flags of one subcommand, or --help-all for all of them.");

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_flag("--desk-scale", g.desk_scale, "Start from the small single-machine preset before applying --config");
  app.add_option("--threads", g.threads, "Worker threads (outputs do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Top-level seed; every random stream derives from it");
  app.add_option("--set", g.overrides, "Override a config key, e.g. --set train.num_steps=200");
  app.add_option("--summary", g.summary, "Where to write the run summary JSON");

  // Per-command flags that override config keys.
  std::optional<std::size_t> count;
  std::optional<std::string> kind;
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<std::string> image_mode;
  std::optional<int> steps;
  std::optional<std::string> motion;
  std::optional<int> blocks;
  std::optional<int> rounds;
  std::optional<int> max_steps;
  std::optional<double> threshold;
  std::optional<std::size_t> save_frames;
  std::optional<int> margin;
  std::optional<std::string> preprocess;

  GenDataArgs gen_data;
  auto* c_gen = app.add_subcommand("gen-data", "Generate a deformation or translation dataset");
  c_gen->add_option("--out", gen_data.out, "Dataset directory")->required();
  c_gen->add_option("--count", count, "Number of pairs");
  c_gen->add_option("--kind", kind, "v1deform or translation");
  c_gen->add_option("--lo", lo, "Lower control displacement (v1deform)");
  c_gen->add_option("--hi", hi, "Upper control displacement (v1deform)");
  c_gen->add_option("--image-mode", image_mode, "float32 or pgm");

  GenObjectsArgs gen_objects;
  auto* c_obj = app.add_subcommand("gen-objects", "Generate a flying-objects dataset");
  c_obj->add_option("--out", gen_objects.out, "Dataset directory")->required();
  c_obj->add_option("--count", count, "Number of pairs");
  c_obj->add_option("--image-mode", image_mode, "float32 or pgm");

  TrainArgs train_args;
  auto* c_train = app.add_subcommand("train", "Supervised training on a dataset");
  c_train->add_option("--data", train_args.data, "Dataset directory")->required();
  c_train->add_option("--out", train_args.out, "Checkpoint file")->required();
  c_train->add_option("--history", train_args.history, "Loss history CSV");
  c_train->add_option("--steps", steps, "Optimizer steps");
  c_train->add_option("--motion", motion, "nonparametric, mixed or parametric");
  c_train->add_option("--blocks", blocks, "Number of sub-vectors K");
  c_train->add_option("--preprocess", preprocess, "none, mean or bandpass");

  TrainUnsupArgs unsup_args;
  auto* c_unsup = app.add_subcommand("train-unsup", "Alternating unsupervised training on a frame sequence");
  c_unsup->add_option("--frames", unsup_args.frames, "Directory of PGM frames (default: synthetic sequence)");
  c_unsup->add_option("--out", unsup_args.out, "Checkpoint file")->required();
  c_unsup->add_option("--fields-dir", unsup_args.fields_dir, "Directory for inferred fields and rounds.csv");
  c_unsup->add_option("--rounds", rounds, "Alternation rounds");

  InferArgs infer_args;
  auto* c_infer = app.add_subcommand("infer", "Infer displacement fields");
  c_infer->add_option("--checkpoint", infer_args.checkpoint, "Checkpoint file")->required();
  c_infer->add_option("--data", infer_args.data, "Dataset directory");
  c_infer->add_option("--current", infer_args.current, "Current frame (PGM)");
  c_infer->add_option("--next", infer_args.next, "Next frame (PGM)");
  c_infer->add_option("--out", infer_args.out, "Output directory")->required();
  c_infer->add_flag("--color", infer_args.color, "Also write color-coded PPM fields");
  c_infer->add_option("--preprocess", preprocess, "none, mean or bandpass");

  AnimateArgs animate_args;
  auto* c_anim = app.add_subcommand("animate", "Drive a frame forward with displacement fields");
  c_anim->add_option("--checkpoint", animate_args.checkpoint, "Checkpoint file")->required();
  c_anim->add_option("--image", animate_args.image, "First frame (PGM)");
  c_anim->add_option("--fields", animate_args.fields, "Field files, applied in order");
  c_anim->add_option("--data", animate_args.data, "Dataset directory; uses the true flow split into steps");
  c_anim->add_option("--pair", animate_args.pair, "Pair index with --data");
  c_anim->add_option("--steps", animate_args.steps, "Number of steps with --data");
  c_anim->add_option("--out", animate_args.out, "Output directory")->required();
  c_anim->add_option("--preprocess", preprocess, "none, mean or bandpass");

  InterpolateArgs interp_args;
  auto* c_interp = app.add_subcommand("interpolate", "Generate in-between frames for dataset pairs");
  c_interp->add_option("--checkpoint", interp_args.checkpoint, "Checkpoint file")->required();
  c_interp->add_option("--data", interp_args.data, "Dataset directory")->required();
  c_interp->add_option("--out", interp_args.out, "Output directory")->required();
  c_interp->add_option("--limit", interp_args.limit, "Only the first N pairs (0 = all)");
  c_interp->add_option("--max-steps", max_steps, "Step budget per pair");
  c_interp->add_option("--threshold", threshold, "Mean absolute difference that counts as arrived");
  c_interp->add_option("--save-frames", save_frames, "Write frames for the first N pairs");
  c_interp->add_option("--preprocess", preprocess, "none, mean or bandpass");

  AnalyzeArgs analyze_args;
  auto* c_analyze = app.add_subcommand("analyze", "Fit Gabor functions to the learned units");
  c_analyze->add_option("--checkpoint", analyze_args.checkpoint, "Checkpoint file")->required();
  c_analyze->add_option("--out", analyze_args.out, "Output directory")->required();

  EvalArgs eval_args;
  auto* c_eval = app.add_subcommand("eval", "Endpoint error of inferred fields against a dataset");
  c_eval->add_option("--data", eval_args.data, "Dataset directory")->required();
  c_eval->add_option("--fields", eval_args.fields, "Directory written by infer");
  c_eval->add_flag("--zero", eval_args.zero, "Evaluate the all-zero predictor");
  c_eval->add_option("--out", eval_args.out, "Output directory")->required();
  c_eval->add_flag("--color", eval_args.color, "Write color-coded truth and prediction");
  c_eval->add_option("--margin", margin, "Border excluded from evaluation");

  FiltersArgs filter_args;
  auto* c_filters = app.add_subcommand("filters", "Render learned filters moved by the motion model");
  c_filters->add_option("--checkpoint", filter_args.checkpoint, "Checkpoint file")->required();
  c_filters->add_option("--out", filter_args.out, "Output directory")->required();
  c_filters->add_option("--block", filter_args.block, "Sub-vector index (-1 = all)");
  c_filters->add_option("--path", filter_args.path, "Displacements as 'dx,dy;dx,dy;...'");
  c_filters->add_option("--vx", filter_args.vx, "Per-frame x displacement when --path is absent");
  c_filters->add_option("--vy", filter_args.vy, "Per-frame y displacement when --path is absent");
  c_filters->add_option("--frames", filter_args.frames, "Frames when --path is absent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  RunConfig cfg = defaults();
  if (g.desk_scale) apply_desk_scale(cfg);
  if (!g.config.empty()) update_from_json(cfg, load_json_file(g.config));
  for (const auto& o : g.overrides) apply_override(cfg, o);
  if (count) {
    cfg.data.count = *count;
    cfg.objects.count = *count;
  }
  if (kind) cfg.data.kind = *kind;
  if (lo) cfg.data.lo = *lo;
  if (hi) cfg.data.hi = *hi;
  if (image_mode) apply_override(cfg, "data.image_mode=\"" + *image_mode + "\"");
  if (steps) cfg.train.num_steps = *steps;
  if (motion) cfg.train.motion = model::motion_kind_from_string(*motion);
  if (blocks) cfg.train.num_blocks = *blocks;
  if (rounds) cfg.unsup.rounds = *rounds;
  if (max_steps) cfg.interpolate.max_steps = *max_steps;
  if (threshold) cfg.interpolate.threshold = *threshold;
  if (save_frames) cfg.interpolate.save_frames = *save_frames;
  if (margin) cfg.eval_margin = *margin;
  if (preprocess) cfg.preprocess = data::preprocess_from_string(*preprocess);
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;
  cfg.finalize();

  const std::vector<std::pair<CLI::App*, std::function<Outcome()>>> table = {
      {c_gen, [&] { return run_gen_data(cfg, gen_data); }},
      {c_obj, [&] { return run_gen_objects(cfg, gen_objects); }},
      {c_train, [&] { return run_train(cfg, train_args); }},
      {c_unsup, [&] { return run_train_unsup(cfg, unsup_args); }},
      {c_infer, [&] { return run_infer(cfg, infer_args); }},
      {c_anim, [&] { return run_animate(cfg, animate_args); }},
      {c_interp, [&] { return run_interpolate(cfg, interp_args); }},
      {c_analyze, [&] { return run_analyze(cfg, analyze_args); }},
      {c_eval, [&] { return run_eval(cfg, eval_args); }},
      {c_filters, [&] { return run_filters(cfg, filter_args); }},
  };
  for (const auto& [sub, fn] : table) {
    if (!sub->parsed()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome outcome = fn();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const nlohmann::json summary = {{"schema_version", kSchemaVersion},
                                    {"command", sub->get_name()},
                                    {"config_hash", config_hash(cfg)},
                                    {"config", to_json(cfg)},
                                    {"seed", cfg.seed},
                                    {"metrics", outcome.metrics},
                                    {"outputs", outcome.outputs},
                                    {"timings", {{"total_seconds", seconds}}}};
    const std::string path = g.summary.empty() ? outcome.summary_path : g.summary;
    write_summary(path, summary);
    std::cerr << sub->get_name() << ": done in " << seconds << " s, summary " << path << '\n';
    return kOk;
  }
  return kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const ShapeError& e) {
    std::cerr << "mismatch: " << e.what() << '\n';
    return kMismatch;
  } catch (const BoundsError& e) {
    std::cerr << "mismatch: " << e.what() << '\n';
    return kMismatch;
  } catch (const LookupError& e) {
    std::cerr << "mismatch: " << e.what() << '\n';
    return kMismatch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}
