// Acceptance runner: one PASS/FAIL line per criterion.
//
//   v1motion_acceptance [--cache DIR] [N ...]
//
// With no numbers every criterion runs. Trained models are kept in the cache
// directory so criteria sharing a model (2 and 8, 4 and 6) train it once.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "helpers.hpp"
#include "v1motion/analysis/gabor.hpp"
#include "v1motion/analysis/statistics.hpp"
#include "v1motion/common/rng.hpp"
#include "v1motion/data/dataset_io.hpp"
#include "v1motion/data/generators.hpp"
#include "v1motion/data/preprocess.hpp"
#include "v1motion/data/sources.hpp"
#include "v1motion/eval/epe.hpp"
#include "v1motion/eval/pnm.hpp"
#include "v1motion/infer/alignment.hpp"
#include "v1motion/infer/animation.hpp"
#include "v1motion/infer/field_io.hpp"
#include "v1motion/infer/grid_inference.hpp"
#include "v1motion/infer/parametric_inference.hpp"
#include "v1motion/model/forward.hpp"
#include "v1motion/train/checkpoint.hpp"
#include "v1motion/train/supervised.hpp"
#include "v1motion/train/unsupervised.hpp"

namespace fs = std::filesystem;
using namespace v1motion;
using model::Image;
using model::MotionKind;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Pinned tolerances and budgets.
constexpr double kGradRelTol = 1e-4;
constexpr std::size_t kGradCoordinates = 120;  // per variant
constexpr double kGradBudgetS = 60.0;
constexpr double kTightFrameTol = 1e-10;
constexpr double kReconTol = 0.15;
constexpr double kTightFrameBudgetS = 15 * 60.0;
constexpr double kTranslationMeanEpe = 0.25;
constexpr double kTranslationBudgetS = 10 * 60.0;
constexpr double kDeformEpe = 1.2;
constexpr double kAlignTol = 1e-10;
constexpr int kAlignInstances = 1000;
constexpr double kAlignBudgetS = 10.0;
constexpr double kInterpSuccess = 0.8;
constexpr int kGaborCount = 200;
constexpr double kGaborParamTol = 1e-3;
constexpr double kGaborR2 = 0.999;
constexpr double kOctaveTol = 1e-12;
constexpr double kEmergenceFraction = 0.5;
constexpr double kEmergenceR2 = 0.7;
constexpr double kMonotoneSlack = 0.01;
constexpr double kUnsupEpe = 1.5;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path g_cache;

// ---------------------------------------------------------------------------
// Desk-scale data and models

data::Dataset deform_set(std::size_t sources, std::uint64_t source_seed, std::size_t count, std::uint64_t seed) {
  const auto src = data::procedural_sources(sources, 96, 96, source_seed);
  data::DeformSpec spec;
  spec.lo = -3.0;
  spec.hi = 3.0;
  spec.seed = seed;
  auto ds = data::gen_v1deform(src, count, spec);
  data::preprocess_pairs(ds.pairs, data::Preprocess::Bandpass);
  return ds;
}

const data::Dataset& deform_train() {
  static const data::Dataset ds = deform_set(200, 11, 2000, 5);
  return ds;
}

const data::Dataset& deform_test() {
  static const data::Dataset ds = deform_set(50, 12, 100, 6);
  return ds;
}

train::TrainConfig tight_frame_config() {
  train::TrainConfig cfg;
  cfg.num_blocks = 10;
  cfg.block_dim = 2;
  cfg.grid = {16, 8};
  cfg.displacements = model::DisplacementGrid(-3.0, 3.0, 0.5);
  cfg.learning_rate = 0.01;
  cfg.num_steps = 2000;
  cfg.lambda_rec = 1.0;
  return cfg;
}

train::TrainConfig deform_config() {
  train::TrainConfig cfg;
  cfg.motion = MotionKind::NonParametricMixed;
  cfg.num_blocks = 40;
  cfg.block_dim = 2;
  cfg.grid = {16, 8};
  cfg.displacements = model::DisplacementGrid(-3.0, 3.0, 0.5);
  cfg.learning_rate = 0.01;
  cfg.num_steps = 1000;
  return cfg;
}

// Trains, or reuses a checkpoint from an earlier criterion in this run.
train::Checkpoint obtain_model(const std::string& name, const train::TrainConfig& cfg,
                               const std::function<const data::Dataset&()>& data) {
  const fs::path path = g_cache.empty() ? fs::path() : g_cache / (name + ".v1ck");
  if (!path.empty() && fs::exists(path)) {
    auto ck = train::read_checkpoint(path);
    if (train::to_json(ck.config) == train::to_json(cfg)) {
      std::printf("  [%s] reusing %s\n", name.c_str(), path.c_str());
      return ck;
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = train::train_supervised(data().pairs, cfg, [&](const train::LossRecord& l) {
    if (l.step % 500 == 0)
      std::printf("  [%s] step %d loss %.5g (rot %.5g rec %.5g)\n", name.c_str(), l.step, l.loss, l.rotation,
                  l.reconstruction);
  });
  std::printf("  [%s] trained %d steps in %.1f s\n", name.c_str(), cfg.num_steps, seconds_since(t0));
  train::Checkpoint ck{cfg, r.encoder, r.motion};
  if (!path.empty()) {
    fs::create_directories(g_cache);
    train::write_checkpoint(path, ck);
  }
  return ck;
}

// ---------------------------------------------------------------------------
// Criterion 1: analytic gradients against central differences.

Result criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sources = data::procedural_sources(4, 48, 48, 301);
  data::DeformSpec spec;
  spec.width = 24;
  spec.height = 24;
  spec.lo = -1.0;
  spec.hi = 1.0;
  spec.seed = 302;
  const auto ds = data::gen_v1deform(sources, 3, spec);

  std::ostringstream detail;
  bool pass = true;
  std::size_t total = 0;
  for (const auto kind : {MotionKind::NonParametric, MotionKind::NonParametricMixed, MotionKind::Parametric}) {
    train::TrainConfig cfg;
    cfg.motion = kind;
    cfg.num_blocks = 3;
    cfg.block_dim = 2;
    cfg.grid = {8, 4};
    cfg.displacements = model::DisplacementGrid(-1.0, 1.0, 0.5);
    cfg.support_radius = 4;
    cfg.support_step = 4;
    auto motion = train::initial_motion(cfg);
    testing::randomize(motion, 303, 0.2);
    const model::Encoder enc(3, 2, 8, testing::random_matrix(6, 64, 304, 0.2));
    const auto fields = train::training_fields(ds.pairs, cfg);
    const auto triplets = train::make_triplets(ds.pairs, fields);
    const auto probe = testing::probe_gradient(enc, motion, cfg.grid, triplets, {1.0, 0.7, 0.2}, kGradCoordinates,
                                               305, kGradRelTol);
    total += probe.coordinates;
    pass = pass && probe.failures == 0;
    detail << model::to_string(kind) << ": " << probe.failures << "/" << probe.coordinates
           << " off (worst rel " << fmt("%.2e", probe.worst) << "); ";
  }
  const double t = seconds_since(t0);
  pass = pass && t < kGradBudgetS && total >= 100;
  detail << fmt("%.1f s", t);
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// Criterion 2: tight frame identity and reconstruction after training.

double relative_error(const Image& a, const Image& b, int lo = 0, int hi = -1) {
  if (hi < 0) hi = a.width();
  double num = 0.0;
  double den = 0.0;
  for (int y = lo; y < std::min(hi, a.height()); ++y)
    for (int x = lo; x < hi; ++x) {
      const double d = a.at(x, y) - b.at(x, y);
      num += d * d;
      den += a.at(x, y) * a.at(x, y);
    }
  return std::sqrt(num / den);
}

Result criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  // Part 1: s = p tiling with an orthonormal square W.
  double identity_err = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const int p = 8;
    const model::Encoder enc(32, 2, p, testing::orthonormal(p * p, 400 + trial));
    const Image img = testing::random_image(64, 48, 410 + trial);
    const Image rec = model::reconstruct(enc, {p, p}, img);
    for (std::size_t i = 0; i < img.size(); ++i)
      identity_err = std::max(identity_err, std::abs(img.samples()[i] - rec.samples()[i]));
  }

  // Part 2: desk-scale training with the reconstruction term on.
  const auto cfg = tight_frame_config();
  const auto ck = obtain_model("tight_frame", cfg, deform_train);
  const auto& test = deform_test();
  double full = 0.0;
  double interior = 0.0;
  const std::size_t n = 50;
  for (std::size_t i = 0; i < n; ++i) {
    const Image& img = test.pairs[i].current;
    const Image rec = model::reconstruct(ck.encoder, cfg.grid, img);
    full += relative_error(img, rec);
    // Pixels covered by four patches.
    interior += relative_error(img, rec, cfg.grid.stride, img.width() - cfg.grid.stride);
  }
  full /= n;
  interior /= n;
  const double t = seconds_since(t0);
  const bool pass = identity_err < kTightFrameTol && full < kReconTol && t < kTightFrameBudgetS;
  return {pass, fmt("identity max err %.2e (< %.0e); held-out relative error %.4f (< %.2f), fully covered interior "
                    "%.4f; %.1f s",
                    identity_err, kTightFrameTol, full, kReconTol, interior, t)};
}

// ---------------------------------------------------------------------------
// Criterion 3: global translations.

Result criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  data::TranslationSpec ts;
  ts.seed = 21;
  auto train_set = data::gen_translation(2000, ts);
  ts.seed = 22;
  auto test_set = data::gen_translation(50, ts);
  data::preprocess_pairs(train_set.pairs, data::Preprocess::Bandpass);
  data::preprocess_pairs(test_set.pairs, data::Preprocess::Bandpass);

  train::TrainConfig cfg;
  cfg.num_blocks = 40;
  cfg.grid = {16, 8};
  cfg.displacements = model::DisplacementGrid(-3.0, 3.0, 0.5);
  cfg.learning_rate = 0.01;
  cfg.num_steps = 2000;
  const auto ck = obtain_model("translation", cfg, [&]() -> const data::Dataset& { return train_set; });

  std::vector<double> errors;
  for (const auto& p : test_set.pairs) {
    const auto field = infer::infer_grid(ck.encoder, ck.motion, cfg.grid, p.current, p.next);
    const auto report = eval::epe(field, p.flow, 8);
    errors.insert(errors.end(), report.errors.begin(), report.errors.end());
  }
  const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  const double exact = static_cast<double>(std::count(errors.begin(), errors.end(), 0.0)) / static_cast<double>(m);
  const double t = seconds_since(t0);
  const bool pass = median == 0.0 && mean < kTranslationMeanEpe && t < kTranslationBudgetS;
  return {pass, fmt("median %.3g (= 0), mean EPE %.4f (< %.2f), exact at %.1f%% of %zu positions; %.1f s", median,
                    mean, kTranslationMeanEpe, 100.0 * exact, m, t)};
}

// ---------------------------------------------------------------------------
// Criterion 4: desk-scale deformation EPE.

Result criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = deform_config();
  const auto ck = obtain_model("deform", cfg, deform_train);
  std::vector<eval::EpeReport> reports;
  for (const auto& p : deform_test().pairs)
    reports.push_back(eval::epe(infer::infer_grid(ck.encoder, ck.motion, cfg.grid, p.current, p.next), p.flow, 8));
  const auto s = eval::summarize(reports);
  return {s.pooled < kDeformEpe, fmt("EPE %.4f px (< %.1f) over %zu pairs, per-image mean %.4f; %.1f s", s.pooled,
                                     kDeformEpe, s.images, s.per_image, seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// Criterion 5: recurrent alignment against the direct sum.

Result criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(500);
  double worst = 0.0;
  for (int trial = 0; trial < kAlignInstances; ++trial) {
    const int K = 1 + static_cast<int>(rng() % 4);
    const int d = 2 + static_cast<int>(rng() % 2);
    const int m = static_cast<int>(rng() % 6);  // horizon 0..5
    const bool parametric = trial % 2 == 0;
    const model::DisplacementGrid grid(-2.0, 2.0, 0.5);
    auto motion = parametric ? model::MotionModel::zero_parametric(K, d, grid)
                             : model::MotionModel::identity_nonparametric(K, d, grid);
    testing::randomize(motion, rng(), 0.3);
    model::Vec2 delta;
    if (parametric) {
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      delta = {u(rng), u(rng)};
    } else {
      delta = grid.candidate(rng() % grid.size());
    }
    std::vector<Eigen::VectorXd> v;
    for (int t = 0; t <= m; ++t) v.push_back(testing::random_matrix(K * d, 1, rng()));

    Eigen::VectorXd direct = Eigen::VectorXd::Zero(K * d);
    for (int k = 0; k < K; ++k) {
      const Eigen::MatrixXd mk = motion.matrix(k, delta);
      for (int t = 0; t <= m; ++t) {
        Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
        for (int e = 0; e < m - t; ++e) power = power * mk;
        direct.segment(k * d, d) += power * v[static_cast<std::size_t>(t)].segment(k * d, d);
      }
    }
    const auto r = infer::align_recurrent(motion, v, delta);
    worst = std::max(worst, (r.u - direct).cwiseAbs().maxCoeff());
  }
  const double t = seconds_since(t0);
  return {worst < kAlignTol && t < kAlignBudgetS,
          fmt("max |recurrent - direct| %.2e (< %.0e) over %d instances, m <= 5; %.2f s", worst, kAlignTol,
              kAlignInstances, t)};
}

// ---------------------------------------------------------------------------
// Criterion 6: interpolation success.

Result criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = deform_config();
  const auto ck = obtain_model("deform", cfg, deform_train);
  const auto& test = deform_test();
  std::vector<int> histogram(11, 0);
  int successes = 0;
  double start = 0.0;
  for (const auto& p : test.pairs) {
    const auto r = infer::interpolate_frames(ck.encoder, ck.motion, cfg.grid, p.current, p.next);
    start += infer::mean_abs_difference(p.current, p.next);
    if (r.success) {
      ++successes;
      ++histogram[r.fields.size()];
    }
  }
  const double rate = static_cast<double>(successes) / static_cast<double>(test.size());
  std::string hist;
  for (std::size_t s = 0; s < histogram.size(); ++s) hist += (s ? "," : "") + std::to_string(histogram[s]);
  return {rate >= kInterpSuccess,
          fmt("%.1f%% of %zu pairs within 10 steps (>= %.0f%%); steps histogram [%s]; mean |I0 - IT| before "
              "interpolating %.4f (threshold %.4f); %.1f s",
              100.0 * rate, test.size(), 100.0 * kInterpSuccess, hist.c_str(), start / test.size(), 10.0 / 255.0,
              seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// Criterion 7: Gabor fitting oracle.

double angle_gap(double a, double b, double period) {
  const double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

Result criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(700);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  double worst = 0.0;
  double worst_r2 = 1.0;
  int failures = 0;
  for (int i = 0; i < kGaborCount; ++i) {
    analysis::GaborParams g;
    g.amplitude = u(0.5, 2.0);
    g.x0 = u(6.0, 9.0);
    g.y0 = u(6.0, 9.0);
    g.theta = u(0.2, kPi - 0.2);
    g.sigma_x = u(1.8, 3.0);
    g.sigma_y = u(1.8, 3.0);
    g.frequency = u(0.12, 0.3);
    g.phase = u(0.2, 2 * kPi - 0.2);
    const auto truth = analysis::canonicalize(g);
    const auto fit = analysis::fit_gabor(analysis::gabor_eval(truth, 16), 16);
    const auto& p = fit.params;
    const double gap = std::max({std::abs(p.amplitude - truth.amplitude), std::abs(p.x0 - truth.x0),
                                 std::abs(p.y0 - truth.y0), angle_gap(p.theta, truth.theta, kPi),
                                 std::abs(p.sigma_x - truth.sigma_x), std::abs(p.sigma_y - truth.sigma_y),
                                 std::abs(p.frequency - truth.frequency), angle_gap(p.phase, truth.phase, 2 * kPi)});
    worst = std::max(worst, gap);
    worst_r2 = std::min(worst_r2, fit.r2);
    if (gap >= kGaborParamTol || fit.r2 <= kGaborR2) ++failures;
  }
  // One octave: sigma * f = 3 sqrt(2 ln 2) / (2 pi).
  analysis::GaborParams octave;
  octave.sigma_x = 2.0;
  octave.frequency = 3.0 * std::sqrt(2.0 * std::log(2.0)) / (2.0 * kPi * 2.0);
  const auto b = analysis::bandwidth_octaves(octave);
  const double octave_err = b ? std::abs(*b - 1.0) : 1.0;
  const bool pass = failures == 0 && octave_err <= kOctaveTol;
  return {pass, fmt("%d/%d fits off; worst parameter gap %.2e (< %.0e), worst r2 %.6f (> %.3f); one-octave case "
                    "error %.1e; %.1f s",
                    failures, kGaborCount, worst, kGaborParamTol, worst_r2, kGaborR2, octave_err, seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// Criterion 8: emergent Gabor-like units after criterion-2 training.

Result criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ck = obtain_model("tight_frame", tight_frame_config(), deform_train);
  const auto units = analysis::fit_units(ck.encoder);
  const auto pairs = analysis::quadrature_stats(ck.encoder, units);
  const auto stats = analysis::population_stats(units, pairs);
  std::string hist;
  for (std::size_t b = 0; b < stats.pair_phase.counts.size(); ++b)
    hist += (b ? "," : "") + std::to_string(stats.pair_phase.counts[b]);
  const std::size_t top = stats.pair_phase.counts.size() - 1;
  const bool mode_ok = stats.pair_phase.total() > 0 && stats.pair_phase.mode() == top;
  const bool pass = stats.fraction_r2_above_07 >= kEmergenceFraction && mode_ok;
  return {pass, fmt("%.0f%% of %zu units with r2 > %.1f (>= %.0f%%), mean r2 %.3f; phase-difference histogram over "
                    "[0, pi/2] in 3 bins [%s], mode bin %zu (want %zu); %.1f s",
                    100.0 * stats.fraction_r2_above_07, stats.units, kEmergenceR2, 100.0 * kEmergenceFraction,
                    stats.r2_mean, hist.c_str(), stats.pair_phase.total() ? stats.pair_phase.mode() : 0, top,
                    seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// Criterion 9: byte-identical artifacts at any thread count.

std::map<std::string, std::vector<std::uint8_t>> slurp_tree(const fs::path& dir) {
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = eval::read_file(e.path());
  return out;
}

std::map<std::string, std::vector<std::uint8_t>> run_pipeline(int threads, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  // Datasets.
  const auto sources = data::procedural_sources(6, 48, 48, 900, threads);
  data::DeformSpec spec;
  spec.width = 32;
  spec.height = 32;
  spec.lo = -2.0;
  spec.hi = 2.0;
  spec.seed = 901;
  auto deform = data::gen_v1deform(sources, 24, spec, threads);
  data::write_dataset(deform, dir / "deform");
  data::write_dataset(deform, dir / "deform_pgm", data::ImageMode::Pgm);
  data::TranslationSpec ts;
  ts.width = 32;
  ts.height = 32;
  ts.seed = 902;
  data::write_dataset(data::gen_translation(8, ts, threads), dir / "translation");
  const auto backgrounds = data::procedural_sources(2, 32, 32, 903, threads);
  const std::vector<data::ObjectLayer> objects = {data::procedural_object(32, 32, 904)};
  data::AffineSceneSpec scene;
  scene.width = 32;
  scene.height = 32;
  scene.seed = 905;
  data::write_dataset(data::gen_flying_objects(backgrounds, objects, 6, scene, threads), dir / "objects");

  // Checkpoints.
  train::TrainConfig cfg;
  cfg.motion = MotionKind::NonParametricMixed;
  cfg.num_blocks = 4;
  cfg.grid = {8, 4};
  cfg.displacements = model::DisplacementGrid(-2.0, 2.0, 0.5);
  cfg.support_radius = 4;
  cfg.support_step = 4;
  cfg.batch_size = 6;
  cfg.num_steps = 15;
  cfg.learning_rate = 0.005;
  cfg.threads = threads;
  const auto mixed = train::train_supervised(deform.pairs, cfg);
  train::write_checkpoint(dir / "mixed.v1ck", {cfg, mixed.encoder, mixed.motion});
  train::TrainConfig pcfg = cfg;
  pcfg.motion = MotionKind::Parametric;
  const auto param = train::train_supervised(deform.pairs, pcfg);
  train::write_checkpoint(dir / "parametric.v1ck", {pcfg, param.encoder, param.motion});

  // Fields and reports.
  infer::InferConfig icfg;
  icfg.margin = 4;
  icfg.max_iterations = 30;
  icfg.smoothness = 0.1;
  icfg.threads = threads;
  std::vector<eval::EpeReport> grid_reports;
  std::vector<eval::EpeReport> param_reports;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = deform.pairs[i];
    const auto g = infer::infer_grid(mixed.encoder, mixed.motion, cfg.grid, p.current, p.next, icfg);
    const auto q = infer::infer_parametric(param.encoder, param.motion, pcfg.grid, p.current, p.next, icfg);
    infer::write_field(dir / ("grid_" + std::to_string(i) + ".v1fd"), {g, 32, 32});
    infer::write_field(dir / ("param_" + std::to_string(i) + ".v1fd"), {q, 32, 32});
    grid_reports.push_back(eval::epe(g, p.flow, 4));
    param_reports.push_back(eval::epe(q, p.flow, 4));
  }
  eval::write_epe_csv(dir / "epe_grid.csv", grid_reports);
  eval::write_epe_csv(dir / "epe_param.csv", param_reports);
  const auto units = analysis::fit_units(mixed.encoder, threads);
  analysis::write_units_csv(dir / "units.csv", units);
  analysis::write_pairs_csv(dir / "pairs.csv", analysis::quadrature_stats(mixed.encoder, units).pairs);
  const auto interp = infer::interpolate_frames(mixed.encoder, mixed.motion, cfg.grid, deform.pairs[0].current,
                                                deform.pairs[0].next, 3, 0.0, true, threads);
  for (std::size_t t = 0; t < interp.frames.size(); ++t)
    eval::write_pgm(dir / ("interp_" + std::to_string(t) + ".pgm"), interp.frames[t]);

  // Unsupervised loop.
  train::UnsupervisedConfig ucfg;
  ucfg.train = pcfg;
  ucfg.train.num_blocks = 3;
  ucfg.init_pairs = 4;
  ucfg.init_steps = 5;
  ucfg.rounds = 2;
  ucfg.steps_per_round = 3;
  ucfg.infer = icfg;
  data::SequenceSpec ss;
  ss.width = 32;
  ss.height = 32;
  ss.frames = 4;
  ss.seed = 906;
  const std::vector<std::vector<Image>> seqs = {data::gen_affine_sequence(ss).frames};
  const auto unsup = train::train_unsupervised(seqs, ucfg);
  train::write_checkpoint(dir / "unsup.v1ck", {ucfg.train, unsup.encoder, unsup.motion});
  for (std::size_t i = 0; i < unsup.fields.size(); ++i)
    infer::write_field(dir / ("unsup_" + std::to_string(i) + ".v1fd"), {unsup.fields[i], 32, 32});
  return slurp_tree(dir);
}

Result criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / "v1motion_acceptance_determinism";
  const auto reference = run_pipeline(1, root / "t1");
  std::size_t bytes = 0;
  for (const auto& [name, content] : reference) bytes += content.size();
  std::vector<std::string> diffs;
  int runs = 0;
  for (const int threads : {1, 2, 4}) {
    const auto other = run_pipeline(threads, root / ("rerun_t" + std::to_string(threads)));
    ++runs;
    if (other.size() != reference.size()) diffs.push_back("file set at threads=" + std::to_string(threads));
    for (const auto& [name, content] : reference) {
      const auto it = other.find(name);
      if (it == other.end() || it->second != content) diffs.push_back(name + "@" + std::to_string(threads));
    }
  }
  fs::remove_all(root);
  std::string first = diffs.empty() ? "none" : diffs.front();
  return {diffs.empty() && reference.size() > 0,
          fmt("%zu artifacts (%zu bytes) compared over %d reruns at threads 1/2/4; %zu differences (first: %s); "
              "%.1f s",
              reference.size(), bytes, runs, diffs.size(), first.c_str(), seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// Criterion 10: unsupervised alternation on a synthetic sequence.

Result criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  data::SequenceSpec ss;
  ss.frames = 30;
  ss.seed = 3;
  const auto seq = data::gen_affine_sequence(ss);
  train::UnsupervisedConfig cfg;
  cfg.train.motion = MotionKind::Parametric;
  cfg.train.num_blocks = 40;
  cfg.train.grid = {8, 4};
  cfg.train.displacements = model::DisplacementGrid(-3.0, 3.0, 0.5);
  cfg.train.learning_rate = 0.003;
  cfg.init_steps = 500;
  cfg.rounds = 5;
  cfg.steps_per_round = 100;
  cfg.infer.smoothness = 0.1;
  cfg.infer.margin = 8;
  const std::vector<std::vector<Image>> seqs = {seq.frames};
  const auto r = train::train_unsupervised(seqs, cfg, [&](const train::RoundRecord& rr) {
    std::printf("  [unsupervised] round %d objective %.6g field change %.4g (%.0f s)\n", rr.round, rr.objective,
                rr.field_change, seconds_since(t0));
  });
  bool monotone = r.rounds.size() >= 2;
  std::string objectives;
  for (std::size_t i = 0; i < r.rounds.size(); ++i) {
    if (i > 0 && r.rounds[i].objective > r.rounds[i - 1].objective * (1.0 + kMonotoneSlack)) monotone = false;
    objectives += fmt("%s%.4g", i ? " -> " : "", r.rounds[i].objective);
  }
  std::vector<eval::EpeReport> reports;
  for (std::size_t i = 0; i < r.fields.size(); ++i) reports.push_back(eval::epe(r.fields[i], seq.flows[i], 8));
  const auto s = eval::summarize(reports);
  return {monotone && s.pooled < kUnsupEpe,
          fmt("objective %s (monotone within %.0f%%: %s); mean EPE %.4f px (< %.1f) over %zu frame pairs; %.1f s",
              objectives.c_str(), 100 * kMonotoneSlack, monotone ? "yes" : "no", s.pooled, kUnsupEpe, s.images,
              seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cache" && i + 1 < argc) {
      g_cache = argv[++i];
    } else {
      const int n = std::atoi(arg.c_str());
      if (n < 1 || n > 10) {
        std::fprintf(stderr, "usage: %s [--cache DIR] [criterion 1..10 ...]\n", argv[0]);
        return 2;
      }
      selected.push_back(n);
    }
  }
  if (selected.empty())
    for (int n = 1; n <= 10; ++n) selected.push_back(n);

  const std::vector<std::function<Result()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8,
                                                         criterion9, criterion10};
  bool all = true;
  for (const int n : selected) {
    Result r;
    try {
      r = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d: %s - %s\n", n, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
