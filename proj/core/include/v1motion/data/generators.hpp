#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "v1motion/data/sample.hpp"
#include "v1motion/data/sources.hpp"

namespace v1motion::data {

/// Smooth random deformation: i.i.d. uniform control displacements on an
/// m x m grid, spline-interpolated to every pixel.
struct DeformSpec {
  int width = 64;
  int height = 64;
  int control = 4;
  double lo = -6.0;
  double hi = 6.0;
  std::uint64_t seed = 1;

  void validate() const;
};

nlohmann::json to_json(const DeformSpec& spec);

/// Pair i uses stream (seed, i): a random source, a random crop of the
/// target size, random controls, then I_{t+1} = warp(I_t, field).
Dataset gen_v1deform(std::span<const model::Image> sources, std::size_t count, const DeformSpec& spec,
                     int threads = 1);

/// Whole-image integer translations in [-max_shift, max_shift]^2, cut from
/// procedural images large enough that no border pixel is synthesized.
struct TranslationSpec {
  int width = 64;
  int height = 64;
  int max_shift = 3;
  std::uint64_t seed = 1;
};

Dataset gen_translation(std::size_t count, const TranslationSpec& spec, int threads = 1);

/// Similarity transform about the frame center c: p -> c + s R(angle) (p - c) + t.
struct Affine {
  double tx = 0.0;
  double ty = 0.0;
  double rotation = 0.0;
  double scale = 1.0;

  model::Vec2 apply(model::Vec2 p, model::Vec2 center) const;
  model::Vec2 inverse(model::Vec2 p, model::Vec2 center) const;
};

struct AffineSceneSpec {
  int width = 64;
  int height = 64;
  double max_translation = 3.0;   ///< background, pixels per axis
  double max_rotation = 0.05;     ///< radians
  double max_log_scale = 0.05;
  double fg_max_translation = 3.0;  ///< foreground, relative to the background
  double fg_max_rotation = 0.1;
  double fg_max_log_scale = 0.05;
  double max_displacement = 6.0;
  int max_retries = 100;
  std::uint64_t seed = 1;

  void validate() const;
};

nlohmann::json to_json(const AffineSceneSpec& spec);

/// Renders one pair. The foreground moves by `background` composed with
/// `relative`; the stored field is the foreground flow wherever the warped
/// mask covers a pixel and the background flow elsewhere. `object` may be
/// null for a background-only scene.
SamplePair render_affine_scene(const model::Image& background, const ObjectLayer* object, const Affine& background_motion,
                               const Affine& relative_motion);

/// Random scenes; parameters are rejection-sampled until every field
/// component lies within max_displacement.
Dataset gen_flying_objects(std::span<const model::Image> backgrounds, std::span<const ObjectLayer> objects,
                           std::size_t count, const AffineSceneSpec& spec, int threads = 1);

/// Frames of one procedural image seen through a slowly moving camera:
/// frame i samples the source at A_i(x) = c_s + s_i R(theta_i) (x - c) + t_i
/// with t_i = i (vx, vy), theta_i = i rotation, s_i = exp(i log_scale).
struct SequenceSpec {
  int width = 64;
  int height = 64;
  int frames = 30;
  double vx = 1.6;
  double vy = -1.2;
  double rotation = 0.01;
  double log_scale = 0.0;
  std::uint64_t seed = 1;
};

struct Sequence {
  std::vector<model::Image> frames;
  std::vector<model::FlowField> flows;  ///< flows[i] carries frames[i] to frames[i + 1]
};

Sequence gen_affine_sequence(const SequenceSpec& spec);

}  // namespace v1motion::data
