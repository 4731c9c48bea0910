#include "v1motion/data/generators.hpp"

#include <algorithm>
#include <cmath>

#include "v1motion/common/error.hpp"
#include "v1motion/common/parallel.hpp"
#include "v1motion/common/rng.hpp"
#include "v1motion/data/spline.hpp"
#include "v1motion/data/warp.hpp"

namespace v1motion::data {

void DeformSpec::validate() const {
  if (width < 1 || height < 1) throw ConfigError("deform spec needs positive image size");
  if (control < 2) throw ConfigError("deform spec needs a control grid of at least 2x2");
  if (!(lo <= hi)) throw ConfigError("deform spec needs lo <= hi");
}

nlohmann::json to_json(const DeformSpec& spec) {
  return {{"generator", "v1deform"}, {"width", spec.width}, {"height", spec.height}, {"control", spec.control},
          {"lo", spec.lo},           {"hi", spec.hi},       {"seed", spec.seed}};
}

namespace {

model::Image crop(const model::Image& source, int x0, int y0, int width, int height) {
  model::Image out(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out.at(x, y) = source.at(x0 + x, y0 + y);
  return out;
}

}  // namespace

Dataset gen_v1deform(std::span<const model::Image> sources, std::size_t count, const DeformSpec& spec, int threads) {
  spec.validate();
  if (sources.empty()) throw ConfigError("gen_v1deform needs at least one source image");
  for (const auto& s : sources)
    if (s.width() < spec.width || s.height() < spec.height)
      throw ShapeError("source image smaller than the requested pair size");

  Dataset data;
  data.spec = to_json(spec);
  data.spec["count"] = count;
  data.pairs.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    Rng rng = make_rng(spec.seed, i);
    const auto& source = sources[uniform_index(rng, sources.size())];
    const int x0 = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(source.width() - spec.width + 1)));
    const int y0 = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(source.height() - spec.height + 1)));

    ControlGrid controls = ControlGrid::constant(spec.control, {});
    for (std::size_t c = 0; c < controls.dx.size(); ++c) {
      controls.dx[c] = uniform(rng, spec.lo, spec.hi);
      controls.dy[c] = uniform(rng, spec.lo, spec.hi);
    }
    SamplePair pair;
    pair.current = crop(source, x0, y0, spec.width, spec.height);
    pair.flow = interpolate_field(controls, spec.width, spec.height, spec.lo, spec.hi);
    model::quantize_to_float(pair.flow);
    pair.next = warp(pair.current, pair.flow);
    model::quantize_to_float(pair.next);
    pair.seed = stream_seed(spec.seed, i);
    data.pairs[i] = std::move(pair);
  });
  return data;
}

Dataset gen_translation(std::size_t count, const TranslationSpec& spec, int threads) {
  if (spec.width < 1 || spec.height < 1 || spec.max_shift < 0) throw ConfigError("invalid translation spec");
  const int r = spec.max_shift;
  Dataset data;
  data.spec = {{"generator", "translation"}, {"width", spec.width}, {"height", spec.height},
               {"max_shift", spec.max_shift}, {"seed", spec.seed},   {"count", count}};
  data.pairs.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    Rng rng = make_rng(spec.seed, i);
    const int dx = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(2 * r + 1))) - r;
    const int dy = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(2 * r + 1))) - r;
    const auto source = procedural_image(spec.width + 2 * r, spec.height + 2 * r, stream_seed(spec.seed, i));
    SamplePair pair;
    pair.current = crop(source, r, r, spec.width, spec.height);
    pair.next = crop(source, r - dx, r - dy, spec.width, spec.height);
    pair.flow = model::FlowField(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) pair.flow.set(x, y, {double(dx), double(dy)});
    pair.seed = stream_seed(spec.seed, i);
    data.pairs[i] = std::move(pair);
  });
  return data;
}

model::Vec2 Affine::apply(model::Vec2 p, model::Vec2 c) const {
  const double co = std::cos(rotation);
  const double si = std::sin(rotation);
  const double u = p.dx - c.dx;
  const double v = p.dy - c.dy;
  return {c.dx + scale * (co * u - si * v) + tx, c.dy + scale * (si * u + co * v) + ty};
}

model::Vec2 Affine::inverse(model::Vec2 p, model::Vec2 c) const {
  const double co = std::cos(rotation);
  const double si = std::sin(rotation);
  const double u = (p.dx - c.dx - tx) / scale;
  const double v = (p.dy - c.dy - ty) / scale;
  return {c.dx + co * u + si * v, c.dy - si * u + co * v};
}

void AffineSceneSpec::validate() const {
  if (width < 1 || height < 1) throw ConfigError("scene spec needs positive image size");
  if (max_translation < 0 || max_rotation < 0 || max_log_scale < 0 || fg_max_translation < 0 || fg_max_rotation < 0 ||
      fg_max_log_scale < 0)
    throw ConfigError("scene parameter ranges must be >= 0");
  if (!(max_displacement > 0.0)) throw ConfigError("max_displacement must be positive");
  if (max_retries < 1) throw ConfigError("max_retries must be >= 1");
}

nlohmann::json to_json(const AffineSceneSpec& spec) {
  return {{"generator", "flying_objects"},
          {"width", spec.width},
          {"height", spec.height},
          {"max_translation", spec.max_translation},
          {"max_rotation", spec.max_rotation},
          {"max_log_scale", spec.max_log_scale},
          {"fg_max_translation", spec.fg_max_translation},
          {"fg_max_rotation", spec.fg_max_rotation},
          {"fg_max_log_scale", spec.fg_max_log_scale},
          {"max_displacement", spec.max_displacement},
          {"max_retries", spec.max_retries},
          {"seed", spec.seed}};
}

SamplePair render_affine_scene(const model::Image& background, const ObjectLayer* object, const Affine& bg,
                               const Affine& rel) {
  const int w = background.width();
  const int h = background.height();
  if (object) {
    if (!object->texture.same_dims(background) || !object->mask.same_dims(background))
      throw ShapeError("foreground and mask must match the background size");
    for (double m : object->mask.samples())
      if (m != 0.0 && m != 1.0) throw ConfigError("foreground mask must be binary");
  }
  const model::Vec2 c{(w - 1) / 2.0, (h - 1) / 2.0};
  SamplePair pair{model::Image(w, h), model::Image(w, h), model::FlowField(w, h), 0};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = object ? object->mask.at(x, y) : 0.0;
      pair.current.at(x, y) = object ? m * object->texture.at(x, y) + (1.0 - m) * background.at(x, y)
                                     : background.at(x, y);

      const model::Vec2 p{double(x), double(y)};
      const model::Vec2 yb = bg.inverse(p, c);
      double value = bilinear_sample(background, yb.dx, yb.dy);
      model::Vec2 source = yb;
      if (object) {
        const model::Vec2 yf = rel.inverse(yb, c);
        const double mf = bilinear_sample(object->mask, yf.dx, yf.dy);
        value = mf * bilinear_sample(object->texture, yf.dx, yf.dy) + (1.0 - mf) * value;
        if (mf >= 0.5) source = yf;
      }
      pair.next.at(x, y) = value;
      pair.flow.set(x, y, {p.dx - source.dx, p.dy - source.dy});
    }
  }
  model::quantize_to_float(pair.current);
  model::quantize_to_float(pair.next);
  model::quantize_to_float(pair.flow);
  return pair;
}

namespace {

double max_component(const model::FlowField& flow) {
  double m = 0.0;
  for (double v : flow.dx_plane()) m = std::max(m, std::abs(v));
  for (double v : flow.dy_plane()) m = std::max(m, std::abs(v));
  return m;
}

Affine sample_affine(Rng& rng, double translation, double rotation, double log_scale) {
  Affine a;
  a.tx = uniform(rng, -translation, translation);
  a.ty = uniform(rng, -translation, translation);
  a.rotation = uniform(rng, -rotation, rotation);
  a.scale = std::exp(uniform(rng, -log_scale, log_scale));
  return a;
}

}  // namespace

Dataset gen_flying_objects(std::span<const model::Image> backgrounds, std::span<const ObjectLayer> objects,
                           std::size_t count, const AffineSceneSpec& spec, int threads) {
  spec.validate();
  if (backgrounds.empty()) throw ConfigError("gen_flying_objects needs at least one background");
  for (const auto& b : backgrounds)
    if (b.width() != spec.width || b.height() != spec.height) throw ShapeError("background size differs from the scene size");

  Dataset data;
  data.spec = to_json(spec);
  data.spec["count"] = count;
  data.pairs.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    Rng rng = make_rng(spec.seed, i);
    const auto& background = backgrounds[uniform_index(rng, backgrounds.size())];
    const ObjectLayer* object = objects.empty() ? nullptr : &objects[uniform_index(rng, objects.size())];
    for (int attempt = 0; attempt < spec.max_retries; ++attempt) {
      const Affine bg = sample_affine(rng, spec.max_translation, spec.max_rotation, spec.max_log_scale);
      const Affine rel = sample_affine(rng, spec.fg_max_translation, spec.fg_max_rotation, spec.fg_max_log_scale);
      SamplePair pair = render_affine_scene(background, object, bg, rel);
      if (max_component(pair.flow) <= spec.max_displacement) {
        pair.seed = stream_seed(spec.seed, i);
        data.pairs[i] = std::move(pair);
        return;
      }
    }
    throw ConfigError("flying objects: no scene within the displacement bound after max_retries attempts");
  });
  return data;
}

Sequence gen_affine_sequence(const SequenceSpec& spec) {
  if (spec.width < 1 || spec.height < 1 || spec.frames < 1) throw ConfigError("invalid sequence spec");
  const model::Vec2 c{(spec.width - 1) / 2.0, (spec.height - 1) / 2.0};
  // Camera map without the source offset.
  auto camera = [&](int i, model::Vec2 p) {
    const Affine a{i * spec.vx, i * spec.vy, i * spec.rotation, std::exp(i * spec.log_scale)};
    return a.apply(p, c);
  };
  double lo_x = 0, lo_y = 0, hi_x = 0, hi_y = 0;
  bool first = true;
  for (int i = 0; i < spec.frames; ++i) {
    for (const model::Vec2 corner : {model::Vec2{0, 0}, model::Vec2{double(spec.width - 1), 0},
                                     model::Vec2{0, double(spec.height - 1)},
                                     model::Vec2{double(spec.width - 1), double(spec.height - 1)}}) {
      const auto q = camera(i, corner);
      lo_x = first ? q.dx : std::min(lo_x, q.dx);
      lo_y = first ? q.dy : std::min(lo_y, q.dy);
      hi_x = first ? q.dx : std::max(hi_x, q.dx);
      hi_y = first ? q.dy : std::max(hi_y, q.dy);
      first = false;
    }
  }
  const int pad = 4;
  const int sw = static_cast<int>(std::ceil(hi_x - lo_x)) + 2 * pad + 1;
  const int sh = static_cast<int>(std::ceil(hi_y - lo_y)) + 2 * pad + 1;
  const model::Vec2 offset{pad - lo_x, pad - lo_y};
  const auto source = procedural_image(sw, sh, spec.seed);

  Sequence seq;
  for (int i = 0; i < spec.frames; ++i) {
    model::Image frame(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) {
        const auto q = camera(i, {double(x), double(y)});
        frame.at(x, y) = bilinear_sample(source, q.dx + offset.dx, q.dy + offset.dy);
      }
    model::quantize_to_float(frame);
    seq.frames.push_back(std::move(frame));
  }
  for (int i = 0; i + 1 < spec.frames; ++i) {
    const Affine a{i * spec.vx, i * spec.vy, i * spec.rotation, std::exp(i * spec.log_scale)};
    model::FlowField flow(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) {
        const model::Vec2 p{double(x), double(y)};
        const auto back = a.inverse(camera(i + 1, p), c);
        flow.set(x, y, {p.dx - back.dx, p.dy - back.dy});
      }
    model::quantize_to_float(flow);
    seq.flows.push_back(std::move(flow));
  }
  return seq;
}

}  // namespace v1motion::data
