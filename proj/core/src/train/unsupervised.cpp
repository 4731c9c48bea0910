#include "v1motion/train/unsupervised.hpp"

#include <set>

#include "v1motion/common/error.hpp"
#include "v1motion/common/parallel.hpp"
#include "v1motion/common/rng.hpp"
#include "v1motion/data/generators.hpp"
#include "v1motion/infer/parametric_inference.hpp"

namespace v1motion::train {

void UnsupervisedConfig::validate() const {
  train.validate();
  infer.validate();
  if (train.motion != model::MotionKind::Parametric) throw ConfigError("unsupervised training needs the parametric variant");
  if (init_pairs < 1 || init_steps < 0) throw ConfigError("stage 1 needs init_pairs >= 1 and init_steps >= 0");
  if (control < 2) throw ConfigError("control grid needs m >= 2");
  if (rounds < 0 || steps_per_round < 0) throw ConfigError("rounds and steps_per_round must be >= 0");
  if (!(stop_change >= 0.0)) throw ConfigError("stop_change must be >= 0");
}

nlohmann::json to_json(const UnsupervisedConfig& cfg) {
  return {{"train", to_json(cfg.train)},
          {"init_pairs", cfg.init_pairs},
          {"init_steps", cfg.init_steps},
          {"control", cfg.control},
          {"rounds", cfg.rounds},
          {"steps_per_round", cfg.steps_per_round},
          {"stop_change", cfg.stop_change},
          {"infer", infer::to_json(cfg.infer)}};
}

void update_from_json(UnsupervisedConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("unsupervised config must be a JSON object");
  static const std::set<std::string> known = {"train",  "init_pairs",      "init_steps",  "control",
                                              "rounds", "steps_per_round", "stop_change", "infer"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown unsupervised config key '" + key + "'");
  try {
    if (j.contains("train")) update_from_json(cfg.train, j.at("train"));
    if (j.contains("infer")) infer::update_from_json(cfg.infer, j.at("infer"));
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("init_pairs", cfg.init_pairs);
    get("init_steps", cfg.init_steps);
    get("control", cfg.control);
    get("rounds", cfg.rounds);
    get("steps_per_round", cfg.steps_per_round);
    get("stop_change", cfg.stop_change);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid unsupervised config value: ") + e.what());
  }
  cfg.validate();
}

std::vector<FramePair> adjacent_pairs(std::span<const std::vector<model::Image>> sequences) {
  std::vector<FramePair> out;
  for (const auto& seq : sequences) {
    if (seq.size() < 2) throw ConfigError("every sequence needs at least two frames");
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      if (!seq[i].same_dims(seq[i + 1])) throw ShapeError("frames of a sequence differ in size");
      out.push_back({&seq[i], &seq[i + 1]});
    }
  }
  return out;
}

namespace {

std::vector<Triplet> triplets_of(std::span<const FramePair> pairs, std::span<const model::DisplacementField> fields) {
  std::vector<Triplet> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = {pairs[i].current, &fields[i], pairs[i].next};
  return out;
}

double smoothness_penalty(const model::DisplacementField& f) {
  const auto& g = f.grid;
  double s = 0.0;
  auto edge = [&](std::size_t a, std::size_t b) {
    const double ex = f.vectors[a].dx - f.vectors[b].dx;
    const double ey = f.vectors[a].dy - f.vectors[b].dy;
    s += ex * ex + ey * ey;
  };
  for (int r = 0; r < g.ny; ++r)
    for (int c = 0; c < g.nx; ++c) {
      const std::size_t a = static_cast<std::size_t>(r) * g.nx + c;
      if (c + 1 < g.nx) edge(a, a + 1);
      if (r + 1 < g.ny) edge(a, a + static_cast<std::size_t>(g.nx));
    }
  return s;
}

std::vector<model::DisplacementField> infer_all(const model::Encoder& enc, const model::MotionModel& motion,
                                                std::span<const FramePair> pairs, const UnsupervisedConfig& cfg,
                                                const std::vector<model::DisplacementField>* warm) {
  std::vector<model::DisplacementField> out(pairs.size());
  parallel_for(pairs.size(), cfg.train.threads, [&](std::size_t i) {
    infer::InferConfig ic = cfg.infer;
    ic.seed = stream_seed(cfg.infer.seed, i);
    ic.threads = 1;
    out[i] = infer::infer_parametric(enc, motion, cfg.train.grid, *pairs[i].current, *pairs[i].next, ic,
                                     warm ? &(*warm)[i] : nullptr);
  });
  return out;
}

}  // namespace

double unsupervised_objective(const model::Encoder& enc, const model::MotionModel& motion,
                              std::span<const FramePair> pairs, std::span<const model::DisplacementField> fields,
                              const UnsupervisedConfig& cfg) {
  if (pairs.size() != fields.size()) throw ShapeError("one field per pair required");
  const auto triplets = triplets_of(pairs, fields);
  const auto base = evaluate_objective(enc, motion, cfg.train.grid, triplets, loss_weights(cfg.train), cfg.train.threads);
  double smooth = 0.0;
  for (const auto& f : fields) smooth += smoothness_penalty(f);
  smooth /= static_cast<double>(fields.size());
  return base.loss + cfg.train.lambda_rot * cfg.infer.smoothness * smooth;
}

UnsupervisedResult train_unsupervised(std::span<const std::vector<model::Image>> sequences,
                                      const UnsupervisedConfig& cfg, const RoundCallback& on_round) {
  cfg.validate();
  const auto pairs = adjacent_pairs(sequences);
  if (pairs.empty()) throw ConfigError("no frame pairs to train on");
  const int w = pairs.front().current->width();
  const int h = pairs.front().current->height();

  // Stage 1: deform single frames like the supervised generator does.
  std::vector<model::Image> frames;
  for (const auto& seq : sequences) frames.insert(frames.end(), seq.begin(), seq.end());
  data::DeformSpec spec;
  spec.width = w;
  spec.height = h;
  spec.control = cfg.control;
  spec.lo = cfg.train.displacements.lo();
  spec.hi = cfg.train.displacements.hi();
  spec.seed = mix_seed(cfg.train.seed);
  const auto synthetic = data::gen_v1deform(frames, static_cast<std::size_t>(cfg.init_pairs), spec, cfg.train.threads);
  TrainConfig stage1 = cfg.train;
  stage1.num_steps = cfg.init_steps;
  auto init = train_supervised(synthetic.pairs, stage1);

  UnsupervisedResult result{std::move(init.encoder), std::move(init.motion), {}, std::move(init.history), {}};

  // Stage 2: infer fields on the real pairs.
  result.fields = infer_all(result.encoder, result.motion, pairs, cfg, nullptr);
  RoundRecord first{0, unsupervised_objective(result.encoder, result.motion, pairs, result.fields, cfg), 0.0};
  result.rounds.push_back(first);
  if (on_round) on_round(first);

  // Stage 3: alternate.
  TrainConfig stage3 = cfg.train;
  stage3.num_steps = cfg.steps_per_round;
  for (int round = 1; round <= cfg.rounds; ++round) {
    stage3.seed = stream_seed(cfg.train.seed, static_cast<std::uint64_t>(round));
    const auto triplets = triplets_of(pairs, result.fields);
    auto trained = train_on_triplets(triplets, stage3, std::move(result.encoder), std::move(result.motion));
    result.encoder = std::move(trained.encoder);
    result.motion = std::move(trained.motion);

    auto fields = infer_all(result.encoder, result.motion, pairs, cfg, &result.fields);
    double change = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) change += fields[i].mean_distance(result.fields[i]);
    change /= static_cast<double>(fields.size());
    result.fields = std::move(fields);

    RoundRecord rec{round, unsupervised_objective(result.encoder, result.motion, pairs, result.fields, cfg), change};
    result.rounds.push_back(rec);
    if (on_round) on_round(rec);
    if (change < cfg.stop_change) break;
  }
  return result;
}

}  // namespace v1motion::train
