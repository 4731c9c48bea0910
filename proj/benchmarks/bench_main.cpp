#include <benchmark/benchmark.h>

#include <random>

#include "v1motion/analysis/gabor.hpp"
#include "v1motion/data/bandpass.hpp"
#include "v1motion/data/generators.hpp"
#include "v1motion/data/sources.hpp"
#include "v1motion/infer/grid_inference.hpp"
#include "v1motion/infer/parametric_inference.hpp"
#include "v1motion/model/forward.hpp"
#include "v1motion/train/objective.hpp"
#include "v1motion/train/supervised.hpp"

using namespace v1motion;

namespace {

model::Encoder random_encoder(int K, int d, int p, std::uint64_t seed) {
  return model::Encoder::random(K, d, p, seed);
}

data::Dataset small_set(int n, int size) {
  const auto sources = data::procedural_sources(4, size + 32, size + 32, 1);
  data::DeformSpec spec;
  spec.width = size;
  spec.height = size;
  spec.lo = -3.0;
  spec.hi = 3.0;
  spec.seed = 2;
  return data::gen_v1deform(sources, static_cast<std::size_t>(n), spec);
}

model::MotionModel perturbed(model::MotionModel m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.05);
  for (auto& v : m.params()) v += g(rng);
  return m;
}

void BM_Encode(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const auto enc = random_encoder(K, 2, 16, 3);
  const auto img = data::procedural_image(64, 64, 4);
  const auto positions = model::GridSpec{16, 8}.positions(64, 64);
  for (auto _ : state) benchmark::DoNotOptimize(model::encode(enc, img, positions.positions));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(positions.size()));
}
BENCHMARK(BM_Encode)->Arg(10)->Arg(40)->Arg(128);

void BM_InferGrid(benchmark::State& state) {
  const bool mixed = state.range(0) != 0;
  const model::DisplacementGrid grid(-3.0, 3.0, 0.5);
  const auto motion = perturbed(mixed ? model::MotionModel::identity_mixed(40, 2, grid, model::mixing_support(4, 2))
                                      : model::MotionModel::identity_nonparametric(40, 2, grid),
                                5);
  const auto enc = random_encoder(40, 2, 16, 6);
  const auto ds = small_set(1, 64);
  infer::InferConfig cfg;
  cfg.mixing = mixed;
  for (auto _ : state)
    benchmark::DoNotOptimize(infer::infer_grid(enc, motion, {16, 8}, ds.pairs[0].current, ds.pairs[0].next, cfg));
}
BENCHMARK(BM_InferGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_InferParametric(benchmark::State& state) {
  const model::DisplacementGrid grid(-3.0, 3.0, 0.5);
  const auto motion = perturbed(model::MotionModel::zero_parametric(40, 2, grid), 7);
  const auto enc = random_encoder(40, 2, 8, 8);
  const auto ds = small_set(1, 64);
  infer::InferConfig cfg;
  cfg.max_iterations = 50;
  cfg.smoothness = 0.1;
  for (auto _ : state)
    benchmark::DoNotOptimize(infer::infer_parametric(enc, motion, {8, 4}, ds.pairs[0].current, ds.pairs[0].next, cfg));
}
BENCHMARK(BM_InferParametric)->Unit(benchmark::kMillisecond);

void BM_GradTotal(benchmark::State& state) {
  const auto kind = static_cast<model::MotionKind>(state.range(0));
  train::TrainConfig cfg;
  cfg.motion = kind;
  cfg.num_blocks = 40;
  cfg.displacements = model::DisplacementGrid(-3.0, 3.0, 0.5);
  const auto motion = perturbed(train::initial_motion(cfg), 9);
  const auto enc = random_encoder(40, 2, 16, 10);
  const auto ds = small_set(32, 64);
  const auto fields = train::training_fields(ds.pairs, cfg);
  const auto triplets = train::make_triplets(ds.pairs, fields);
  for (auto _ : state) benchmark::DoNotOptimize(train::grad_total(enc, motion, cfg.grid, triplets, {}));
  state.SetLabel(model::to_string(kind) + ", batch 32");
}
BENCHMARK(BM_GradTotal)
    ->Arg(static_cast<int>(model::MotionKind::NonParametric))
    ->Arg(static_cast<int>(model::MotionKind::NonParametricMixed))
    ->Arg(static_cast<int>(model::MotionKind::Parametric))
    ->Unit(benchmark::kMillisecond);

void BM_Bandpass(benchmark::State& state) {
  const auto img = data::procedural_image(64, 64, 11);
  for (auto _ : state) benchmark::DoNotOptimize(data::bandpass(img));
}
BENCHMARK(BM_Bandpass);

void BM_FitGabor(benchmark::State& state) {
  analysis::GaborParams g{1.0, 7.3, 8.1, 0.9, 2.2, 2.6, 0.2, 1.1};
  const auto unit = analysis::gabor_eval(g, 16);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::fit_gabor(unit, 16));
}
BENCHMARK(BM_FitGabor)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
