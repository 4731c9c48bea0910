#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "v1motion/analysis/filters.hpp"
#include "v1motion/analysis/gabor.hpp"
#include "v1motion/analysis/statistics.hpp"
#include "v1motion/common/error.hpp"
#include "v1motion/common/rng.hpp"
#include "v1motion/data/sources.hpp"
#include "v1motion/eval/epe.hpp"
#include "v1motion/eval/flow_color.hpp"
#include "v1motion/eval/pnm.hpp"
#include "v1motion/infer/animation.hpp"
#include "v1motion/infer/field_io.hpp"
#include "v1motion/infer/grid_inference.hpp"
#include "v1motion/infer/parametric_inference.hpp"
#include "v1motion/model/forward.hpp"
#include "v1motion/train/checkpoint.hpp"
#include "v1motion/train/supervised.hpp"

namespace v1motion::cli {

namespace fs = std::filesystem;

namespace {

void note(const std::string& msg) { std::cerr << msg << '\n'; }

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what + " path");
  if (!fs::is_regular_file(path)) throw IoError(std::string(what) + " not found: " + path);
}

void require_dir(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what + " path");
  if (!fs::is_directory(path)) throw IoError(std::string(what) + " directory not found: " + path);
}

void make_dir(const std::string& path) {
  if (path.empty()) throw ConfigError("missing output path");
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

void make_parent(const std::string& path) {
  if (path.empty()) throw ConfigError("missing output path");
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) make_dir(parent.string());
}

std::string numbered(const char* prefix, std::size_t i, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%06zu%s", prefix, i, suffix);
  return buf;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path.string());
  out.precision(17);
  return out;
}

model::Image for_display(const model::Image& img, data::Preprocess p) {
  return p == data::Preprocess::None ? img : eval::normalize_for_display(img);
}

data::Dataset load_dataset(const std::string& dir) {
  data::Dataset ds = data::read_dataset(dir);
  if (ds.empty()) throw ConfigError("dataset " + dir + " has no pairs");
  return ds;
}

void check_fits(const model::GridSpec& grid, const model::Image& image) {
  if (image.width() < grid.patch || image.height() < grid.patch)
    throw ShapeError("images are smaller than the patch size");
}

model::DisplacementField infer_pair(const train::Checkpoint& ck, const infer::InferConfig& cfg,
                                    const model::Image& a, const model::Image& b) {
  check_fits(ck.config.grid, a);
  if (ck.motion.parametric()) return infer::infer_parametric(ck.encoder, ck.motion, ck.config.grid, a, b, cfg);
  return infer::infer_grid(ck.encoder, ck.motion, ck.config.grid, a, b, cfg);
}

double mean_magnitude(const model::DisplacementField& f) {
  if (f.size() == 0) return 0.0;
  double s = 0.0;
  for (const auto& v : f.vectors) s += std::hypot(v.dx, v.dy);
  return s / static_cast<double>(f.size());
}

nlohmann::json histogram_json(const analysis::Histogram& h) {
  return {{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}};
}

// Inferred fields skip the border of D-; animation needs every lattice point, so the
// border takes the vector of the nearest inferred position.
model::DisplacementField fill_lattice(const model::DisplacementField& field, const model::PositionGrid& lattice) {
  if (field.size() == 0) throw ShapeError("field has no positions");
  model::DisplacementField out;
  out.grid = lattice;
  out.vectors.reserve(lattice.size());
  for (const auto& p : lattice.positions) {
    std::size_t best = 0;
    long best_d = -1;
    for (std::size_t i = 0; i < field.size(); ++i) {
      const auto& q = field.positions()[i];
      const long d = static_cast<long>(q.x - p.x) * (q.x - p.x) + static_cast<long>(q.y - p.y) * (q.y - p.y);
      if (best_d < 0 || d < best_d) {
        best_d = d;
        best = i;
      }
    }
    out.vectors.push_back(field.vectors[best]);
  }
  return out;
}

std::vector<model::Vec2> parse_path(const std::string& text) {
  std::vector<model::Vec2> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    double dx = 0.0;
    double dy = 0.0;
    char comma = 0;
    std::istringstream is(item);
    if (!(is >> dx >> comma >> dy) || comma != ',') throw ConfigError("bad path element '" + item + "' (want dx,dy)");
    out.push_back({dx, dy});
  }
  if (out.empty()) throw ConfigError("filter path is empty");
  return out;
}

}  // namespace

Outcome run_gen_data(const RunConfig& cfg, const GenDataArgs& args) {
  make_dir(args.out);
  const auto& d = cfg.data;
  data::Dataset ds;
  if (d.kind == "v1deform") {
    note("gen-data: rendering " + std::to_string(d.sources) + " source images");
    const auto sources =
        data::procedural_sources(d.sources, d.source_size, d.source_size, stream_seed(cfg.seed, 1), cfg.threads);
    data::DeformSpec spec;
    spec.width = d.width;
    spec.height = d.height;
    spec.control = d.control;
    spec.lo = d.lo;
    spec.hi = d.hi;
    spec.seed = stream_seed(cfg.seed, 2);
    ds = data::gen_v1deform(sources, d.count, spec, cfg.threads);
  } else {
    data::TranslationSpec spec;
    spec.width = d.width;
    spec.height = d.height;
    spec.max_shift = d.max_shift;
    spec.seed = stream_seed(cfg.seed, 2);
    ds = data::gen_translation(d.count, spec, cfg.threads);
  }
  ds.spec["schema_version"] = kSchemaVersion;
  ds.spec["run_seed"] = cfg.seed;
  data::write_dataset(ds, args.out, d.image_mode);

  double sum = 0.0;
  double peak = 0.0;
  std::size_t n = 0;
  for (const auto& p : ds.pairs)
    for (std::size_t i = 0; i < p.flow.dx_plane().size(); ++i) {
      const double m = std::hypot(p.flow.dx_plane()[i], p.flow.dy_plane()[i]);
      sum += m;
      peak = std::max(peak, m);
      ++n;
    }
  Outcome o;
  o.metrics = {{"pairs", ds.size()},
               {"width", d.width},
               {"height", d.height},
               {"mean_flow_magnitude", n ? sum / static_cast<double>(n) : 0.0},
               {"max_flow_magnitude", peak}};
  o.outputs = {args.out};
  o.summary_path = (fs::path(args.out) / "summary.json").string();
  return o;
}

Outcome run_gen_objects(const RunConfig& cfg, const GenObjectsArgs& args) {
  make_dir(args.out);
  const auto& o = cfg.objects;
  const auto backgrounds = data::procedural_sources(o.backgrounds, o.scene.width, o.scene.height,
                                                    stream_seed(cfg.seed, 3), cfg.threads);
  std::vector<data::ObjectLayer> objects;
  objects.reserve(o.objects);
  const std::uint64_t object_seed = stream_seed(cfg.seed, 4);
  for (std::size_t i = 0; i < o.objects; ++i)
    objects.push_back(data::procedural_object(o.scene.width, o.scene.height, stream_seed(object_seed, i)));
  data::Dataset ds = data::gen_flying_objects(backgrounds, objects, o.count, o.scene, cfg.threads);
  ds.spec["schema_version"] = kSchemaVersion;
  ds.spec["run_seed"] = cfg.seed;
  data::write_dataset(ds, args.out, cfg.data.image_mode);
  Outcome out;
  out.metrics = {{"pairs", ds.size()}, {"backgrounds", o.backgrounds}, {"objects", o.objects}};
  out.outputs = {args.out};
  out.summary_path = (fs::path(args.out) / "summary.json").string();
  return out;
}

Outcome run_train(const RunConfig& cfg, const TrainArgs& args) {
  require_dir(args.data, "dataset");
  make_parent(args.out);
  if (!args.history.empty()) make_parent(args.history);

  data::Dataset ds = load_dataset(args.data);
  data::preprocess_pairs(ds.pairs, cfg.preprocess);
  check_fits(cfg.train.grid, ds.pairs.front().current);
  note("train: " + std::to_string(ds.size()) + " pairs, " + std::to_string(cfg.train.num_steps) + " steps, " +
       model::to_string(cfg.train.motion));
  const auto result = train::train_supervised(ds.pairs, cfg.train, [](const train::LossRecord& r) {
    if (r.step % 100 == 0) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "train: step %d loss %.6g rot %.6g rec %.6g", r.step, r.loss, r.rotation,
                    r.reconstruction);
      note(buf);
    }
  });
  train::write_checkpoint(args.out, {cfg.train, result.encoder, result.motion});

  Outcome o;
  o.outputs = {args.out};
  if (!args.history.empty()) {
    auto csv = open_csv(args.history);
    csv << "step,loss,rotation,reconstruction\n";
    for (const auto& r : result.history) csv << r.step << ',' << r.loss << ',' << r.rotation << ',' << r.reconstruction << '\n';
    o.outputs.push_back(args.history);
  }

  const std::size_t tail = std::min<std::size_t>(50, result.history.size());
  double final_loss = 0.0;
  for (std::size_t i = result.history.size() - tail; i < result.history.size(); ++i) final_loss += result.history[i].loss;
  double rel = 0.0;
  const std::size_t probe = std::min<std::size_t>(20, ds.size());
  for (std::size_t i = 0; i < probe; ++i) {
    const auto& img = ds.pairs[i].current;
    const auto rec = model::reconstruct(result.encoder, cfg.train.grid, img);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t s = 0; s < img.size(); ++s) {
      num += (img.samples()[s] - rec.samples()[s]) * (img.samples()[s] - rec.samples()[s]);
      den += img.samples()[s] * img.samples()[s];
    }
    rel += den > 0.0 ? std::sqrt(num / den) : 0.0;
  }
  o.metrics = {{"pairs", ds.size()},
               {"steps", result.history.size()},
               {"first_loss", result.history.empty() ? 0.0 : result.history.front().loss},
               {"final_loss", tail ? final_loss / static_cast<double>(tail) : 0.0},
               {"train_relative_reconstruction_error", probe ? rel / static_cast<double>(probe) : 0.0}};
  o.summary_path = args.out + ".summary.json";
  return o;
}

Outcome run_train_unsup(const RunConfig& cfg, const TrainUnsupArgs& args) {
  if (!args.frames.empty()) require_dir(args.frames, "frames");
  make_parent(args.out);
  if (!args.fields_dir.empty()) make_dir(args.fields_dir);

  std::vector<model::Image> frames;
  std::vector<model::FlowField> truth;
  if (!args.frames.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(args.frames))
      if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.size() < 2) throw ConfigError("need at least two .pgm frames in " + args.frames);
    for (const auto& f : files) frames.push_back(eval::read_pgm(f));
  } else {
    auto seq = data::gen_affine_sequence(cfg.sequence);
    frames = std::move(seq.frames);
    truth = std::move(seq.flows);
  }
  for (auto& f : frames) f = data::preprocess(f, cfg.unsup_preprocess);
  check_fits(cfg.unsup.train.grid, frames.front());

  note("train-unsup: " + std::to_string(frames.size()) + " frames, " + std::to_string(cfg.unsup.rounds) + " rounds");
  const std::vector<std::vector<model::Image>> sequences = {frames};
  const auto result = train::train_unsupervised(sequences, cfg.unsup, [](const train::RoundRecord& r) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "train-unsup: round %d objective %.6g change %.4g", r.round, r.objective,
                  r.field_change);
    note(buf);
  });
  train::write_checkpoint(args.out, {cfg.unsup.train, result.encoder, result.motion});

  Outcome o;
  o.outputs = {args.out};
  if (!args.fields_dir.empty()) {
    const fs::path dir(args.fields_dir);
    for (std::size_t i = 0; i < result.fields.size(); ++i)
      infer::write_field(dir / numbered("field_", i, ".v1fd"), {result.fields[i], frames[i].width(), frames[i].height()});
    auto csv = open_csv(dir / "rounds.csv");
    csv << "round,objective,field_change\n";
    for (const auto& r : result.rounds) csv << r.round << ',' << r.objective << ',' << r.field_change << '\n';
    o.outputs.push_back(args.fields_dir);
  }

  nlohmann::json rounds = nlohmann::json::array();
  bool monotone = true;
  for (std::size_t i = 0; i < result.rounds.size(); ++i) {
    rounds.push_back({{"round", result.rounds[i].round},
                      {"objective", result.rounds[i].objective},
                      {"field_change", result.rounds[i].field_change}});
    if (i > 0 && result.rounds[i].objective > result.rounds[i - 1].objective * 1.01) monotone = false;
  }
  o.metrics = {{"frames", frames.size()}, {"rounds", rounds}, {"objective_monotone_1pct", monotone}};
  if (!truth.empty()) {
    std::vector<eval::EpeReport> reports;
    for (std::size_t i = 0; i < result.fields.size(); ++i)
      reports.push_back(eval::epe(result.fields[i], truth[i], cfg.eval_margin));
    const auto s = eval::summarize(reports);
    o.metrics["epe_pooled"] = s.pooled;
    o.metrics["epe_per_image"] = s.per_image;
  }
  o.summary_path = args.fields_dir.empty() ? args.out + ".summary.json" : (fs::path(args.fields_dir) / "summary.json").string();
  return o;
}

Outcome run_infer(const RunConfig& cfg, const InferArgs& args) {
  require_file(args.checkpoint, "checkpoint");
  const bool single = !args.current.empty() || !args.next.empty();
  if (single == !args.data.empty()) throw ConfigError("infer needs either --data or both --current and --next");
  if (single) {
    require_file(args.current, "current frame");
    require_file(args.next, "next frame");
  } else {
    require_dir(args.data, "dataset");
  }
  make_dir(args.out);

  const auto ck = train::read_checkpoint(args.checkpoint);
  data::Dataset ds;
  if (single) {
    data::SamplePair p;
    p.current = eval::read_pgm(args.current);
    p.next = eval::read_pgm(args.next);
    if (!p.current.same_dims(p.next)) throw ShapeError("frames differ in size");
    ds.pairs.push_back(std::move(p));
  } else {
    ds = load_dataset(args.data);
  }

  const fs::path dir(args.out);
  std::vector<eval::EpeReport> reports;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& p = ds.pairs[i];
    const auto a = data::preprocess(p.current, cfg.preprocess);
    const auto b = data::preprocess(p.next, cfg.preprocess);
    const auto field = infer_pair(ck, cfg.infer, a, b);
    infer::write_field(dir / numbered("field_", i, ".v1fd"), {field, a.width(), a.height()});
    if (args.color)
      eval::write_ppm(dir / numbered("flow_", i, ".ppm"),
                      eval::flow_to_color(eval::expand_field(field, a.width(), a.height(), ck.config.grid.stride)));
    magnitude += mean_magnitude(field);
    if (!single) reports.push_back(eval::epe(field, p.flow, cfg.eval_margin));
    if ((i + 1) % 50 == 0) note("infer: " + std::to_string(i + 1) + "/" + std::to_string(ds.size()));
  }
  Outcome o;
  o.metrics = {{"pairs", ds.size()},
               {"model", model::to_string(ck.motion.kind())},
               {"mean_displacement_magnitude", magnitude / static_cast<double>(ds.size())}};
  if (!reports.empty()) {
    const auto s = eval::summarize(reports);
    o.metrics["epe_pooled"] = s.pooled;
    o.metrics["epe_per_image"] = s.per_image;
  }
  o.outputs = {args.out};
  o.summary_path = (fs::path(args.out) / "summary.json").string();
  return o;
}

Outcome run_animate(const RunConfig& cfg, const AnimateArgs& args) {
  require_file(args.checkpoint, "checkpoint");
  const bool from_data = !args.data.empty();
  if (from_data == !args.image.empty()) throw ConfigError("animate needs either --data or --image");
  if (from_data) {
    require_dir(args.data, "dataset");
    if (args.steps < 1) throw ConfigError("--steps must be >= 1");
  } else {
    if (args.fields.empty()) throw ConfigError("animate --image needs at least one --fields file");
    require_file(args.image, "image");
    for (const auto& f : args.fields) require_file(f, "field");
  }
  make_dir(args.out);

  const auto ck = train::read_checkpoint(args.checkpoint);
  const auto& grid = ck.config.grid;
  model::Image first;
  model::Image target;
  std::vector<model::DisplacementField> fields;
  if (from_data) {
    const auto ds = load_dataset(args.data);
    if (args.pair >= ds.size()) throw ConfigError("--pair is out of range for " + args.data);
    const auto& p = ds.pairs[args.pair];
    first = data::preprocess(p.current, cfg.preprocess);
    target = data::preprocess(p.next, cfg.preprocess);
    check_fits(grid, first);
    // Split the true flow into equal steps and snap each to the candidate grid.
    model::FlowField part(p.flow.width(), p.flow.height());
    for (std::size_t s = 0; s < part.dx_plane().size(); ++s) {
      part.dx_plane()[s] = p.flow.dx_plane()[s] / args.steps;
      part.dy_plane()[s] = p.flow.dy_plane()[s] / args.steps;
    }
    const auto step = model::round_to_grid(
        model::DisplacementField::sample(part, grid.positions(first.width(), first.height())), ck.motion.grid());
    fields.assign(static_cast<std::size_t>(args.steps), step);
  } else {
    first = data::preprocess(eval::read_pgm(args.image), cfg.preprocess);
    check_fits(grid, first);
    for (const auto& f : args.fields) {
      auto file = infer::read_field(f);
      if (file.width != first.width() || file.height != first.height())
        throw ShapeError("field " + f + " was inferred for a different image size");
      fields.push_back(fill_lattice(file.field, grid.positions(first.width(), first.height())));
    }
  }

  // animate() returns the generated frames only; the written sequence starts with the input.
  std::vector<model::Image> frames = {first};
  for (auto& f : infer::animate(ck.encoder, ck.motion, grid, first, fields, cfg.infer.mixing)) frames.push_back(std::move(f));
  const fs::path dir(args.out);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.pgm", t);
    eval::write_pgm(dir / name, for_display(frames[t], cfg.preprocess));
  }
  Outcome o;
  o.metrics = {{"frames", frames.size()}, {"steps", fields.size()}};
  if (from_data) {
    o.metrics["pair"] = args.pair;
    o.metrics["start_distance_255"] = 255.0 * infer::mean_abs_difference(first, target);
    o.metrics["final_distance_255"] = 255.0 * infer::mean_abs_difference(frames.back(), target);
  }
  o.outputs = {args.out};
  o.summary_path = (fs::path(args.out) / "summary.json").string();
  return o;
}

Outcome run_interpolate(const RunConfig& cfg, const InterpolateArgs& args) {
  require_file(args.checkpoint, "checkpoint");
  require_dir(args.data, "dataset");
  make_dir(args.out);

  const auto ck = train::read_checkpoint(args.checkpoint);
  const auto ds = load_dataset(args.data);
  const std::size_t n = args.limit == 0 ? ds.size() : std::min(args.limit, ds.size());
  const auto& ip = cfg.interpolate;
  const fs::path dir(args.out);
  auto csv = open_csv(dir / "interpolation.csv");
  csv << "pair,success,steps,final_error\n";
  std::vector<std::size_t> histogram(static_cast<std::size_t>(ip.max_steps) + 1, 0);
  std::size_t successes = 0;
  double error = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = data::preprocess(ds.pairs[i].current, cfg.preprocess);
    const auto b = data::preprocess(ds.pairs[i].next, cfg.preprocess);
    check_fits(ck.config.grid, a);
    const auto r = infer::interpolate_frames(ck.encoder, ck.motion, ck.config.grid, a, b, ip.max_steps, ip.threshold,
                                             cfg.infer.mixing, cfg.threads);
    csv << i << ',' << (r.success ? 1 : 0) << ',' << r.fields.size() << ',' << r.final_error << '\n';
    if (r.success) {
      ++successes;
      ++histogram[r.fields.size()];
    }
    error += r.final_error;
    if (i < ip.save_frames) {
      const fs::path sub = dir / numbered("pair_", i, "");
      make_dir(sub.string());
      for (std::size_t t = 0; t < r.frames.size(); ++t) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03zu.pgm", t);
        eval::write_pgm(sub / name, for_display(r.frames[t], cfg.preprocess));
      }
      eval::write_pgm(sub / "target.pgm", for_display(b, cfg.preprocess));
    }
  }
  Outcome o;
  o.metrics = {{"pairs", n},
               {"successes", successes},
               {"success_rate", n ? static_cast<double>(successes) / static_cast<double>(n) : 0.0},
               {"step_histogram", histogram},
               {"mean_final_error", n ? error / static_cast<double>(n) : 0.0}};
  o.outputs = {(dir / "interpolation.csv").string()};
  o.summary_path = (fs::path(args.out) / "summary.json").string();
  return o;
}

Outcome run_analyze(const RunConfig& cfg, const AnalyzeArgs& args) {
  require_file(args.checkpoint, "checkpoint");
  make_dir(args.out);
  const auto ck = train::read_checkpoint(args.checkpoint);
  analysis::FitOptions options;
  options.max_iterations = cfg.analysis.max_iterations;
  note("analyze: fitting " + std::to_string(ck.encoder.rows()) + " units");
  const auto units = analysis::fit_units(ck.encoder, cfg.threads, options);
  const auto pairs = analysis::quadrature_stats(ck.encoder, units, cfg.analysis.min_r2);
  const auto stats = analysis::population_stats(units, pairs);

  const fs::path dir(args.out);
  analysis::write_units_csv(dir / "units.csv", units);
  analysis::write_pairs_csv(dir / "pairs.csv", pairs.pairs);
  const int patch = ck.encoder.patch();
  std::vector<Eigen::VectorXd> rows;
  std::vector<Eigen::VectorXd> fits;
  for (int r = 0; r < ck.encoder.rows(); ++r) rows.push_back(ck.encoder.weights().row(r).transpose());
  for (const auto& u : units) fits.push_back(analysis::gabor_eval(u.fit.params, patch));
  const int columns = cfg.analysis.columns;
  eval::write_pgm(dir / "filters.pgm", analysis::montage(rows, patch, columns));
  eval::write_pgm(dir / "gabor_fits.pgm", analysis::montage(fits, patch, columns));

  Outcome o;
  o.metrics = {{"units", stats.units},
               {"r2_mean", stats.r2_mean},
               {"r2_std", stats.r2_std},
               {"fraction_r2_above_0.7", stats.fraction_r2_above_07},
               {"bandwidth_histogram", histogram_json(stats.bandwidth)},
               {"bandwidth_undefined", stats.bandwidth_undefined},
               {"phase_histogram", histogram_json(stats.phase)},
               {"pair_phase_histogram", histogram_json(stats.pair_phase)},
               {"pair_phase_mode_bin", stats.pair_phase.total() ? nlohmann::json(stats.pair_phase.mode()) : nlohmann::json()},
               {"pairs", stats.pairs},
               {"pairs_skipped", stats.pairs_skipped}};
  o.outputs = {(dir / "units.csv").string(), (dir / "pairs.csv").string(), (dir / "filters.pgm").string(),
               (dir / "gabor_fits.pgm").string()};
  o.summary_path = (fs::path(args.out) / "summary.json").string();
  return o;
}

Outcome run_eval(const RunConfig& cfg, const EvalArgs& args) {
  require_dir(args.data, "dataset");
  if (args.zero == !args.fields.empty()) throw ConfigError("eval needs either --fields or --zero");
  if (!args.zero) require_dir(args.fields, "fields");
  make_dir(args.out);

  const auto ds = load_dataset(args.data);
  const fs::path dir(args.out);
  std::vector<eval::EpeReport> reports;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& p = ds.pairs[i];
    const int w = p.flow.width();
    const int h = p.flow.height();
    model::DisplacementField pred;
    int stride = cfg.train.grid.stride;
    if (args.zero) {
      pred = model::DisplacementField::zeros(cfg.train.grid.positions(w, h));
    } else {
      const auto path = fs::path(args.fields) / numbered("field_", i, ".v1fd");
      require_file(path.string(), "field");
      auto file = infer::read_field(path);
      if (file.width != w || file.height != h) throw ShapeError("field " + path.string() + " does not match the dataset size");
      pred = std::move(file.field);
      if (pred.grid.nx > 1) stride = pred.grid.positions[1].x - pred.grid.positions[0].x;
    }
    reports.push_back(eval::epe(pred, p.flow, cfg.eval_margin));
    if (args.color) {
      const auto pred_flow = eval::expand_field(pred, w, h, stride);
      double peak = 0.0;
      for (const auto* f : {&p.flow, &pred_flow})
        for (std::size_t s = 0; s < f->dx_plane().size(); ++s)
          peak = std::max(peak, std::hypot(f->dx_plane()[s], f->dy_plane()[s]));
      eval::write_ppm(dir / numbered("truth_", i, ".ppm"), eval::flow_to_color(p.flow, peak));
      eval::write_ppm(dir / numbered("pred_", i, ".ppm"), eval::flow_to_color(pred_flow, peak));
    }
  }
  eval::write_epe_csv(dir / "epe.csv", reports);
  const auto s = eval::summarize(reports);
  Outcome o;
  o.metrics = {{"epe_pooled", s.pooled},
               {"epe_per_image", s.per_image},
               {"images", s.images},
               {"positions", s.positions},
               {"margin", cfg.eval_margin},
               {"predictor", args.zero ? "zero" : "fields"}};
  o.outputs = {(dir / "epe.csv").string()};
  o.summary_path = (fs::path(args.out) / "summary.json").string();
  return o;
}

Outcome run_filters(const RunConfig&, const FiltersArgs& args) {
  require_file(args.checkpoint, "checkpoint");
  make_dir(args.out);
  const auto ck = train::read_checkpoint(args.checkpoint);

  std::vector<model::Vec2> path;
  if (!args.path.empty()) {
    path = parse_path(args.path);
  } else {
    if (args.frames < 1) throw ConfigError("--frames must be >= 1");
    for (int t = 0; t < args.frames; ++t) path.push_back({t * args.vx, t * args.vy});
  }
  if (!ck.motion.parametric())
    for (auto& delta : path) delta = ck.motion.grid().round(delta);

  const int k_count = ck.encoder.num_blocks();
  if (args.block < -1 || args.block >= k_count) throw ConfigError("--block is out of range");
  const int first = args.block < 0 ? 0 : args.block;
  const int last = args.block < 0 ? k_count : args.block + 1;
  const fs::path dir(args.out);
  const int d = ck.encoder.block_dim();
  for (int k = first; k < last; ++k) {
    const auto steps = analysis::animate_filters(ck.encoder, ck.motion, k, path);
    // One row per member of the sub-vector, one column per path step.
    std::vector<Eigen::VectorXd> tiles;
    for (int j = 0; j < d; ++j)
      for (const auto& m : steps) tiles.push_back(m.row(j).transpose());
    char name[32];
    std::snprintf(name, sizeof name, "block_%03d.pgm", k);
    eval::write_pgm(dir / name, analysis::montage(tiles, ck.encoder.patch(), static_cast<int>(path.size())));
  }
  nlohmann::json path_json = nlohmann::json::array();
  for (const auto& delta : path) path_json.push_back({delta.dx, delta.dy});
  Outcome o;
  o.metrics = {{"blocks", last - first}, {"path", path_json}};
  o.outputs = {args.out};
  o.summary_path = (fs::path(args.out) / "summary.json").string();
  return o;
}

}  // namespace v1motion::cli
