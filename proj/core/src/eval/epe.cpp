#include "v1motion/eval/epe.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "v1motion/common/error.hpp"

namespace v1motion::eval {

namespace {

template <class Truth>
EpeReport evaluate(const model::DisplacementField& pred, int width, int height, int margin, Truth&& truth) {
  if (margin < 0) throw ConfigError("margin must be >= 0");
  EpeReport r;
  r.margin = margin;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto p = pred.positions()[i];
    if (p.x < margin || p.y < margin || p.x > width - 1 - margin || p.y > height - 1 - margin) continue;
    const model::Vec2 t = truth(i, p);
    const model::Vec2 v = pred.vectors[i];
    const double e = std::hypot(v.dx - t.dx, v.dy - t.dy);
    r.positions.push_back(p);
    r.errors.push_back(e);
    sum += e;
  }
  r.count = r.errors.size();
  if (r.count == 0) throw ConfigError("no prediction position survives the border margin");
  r.mean = sum / static_cast<double>(r.count);
  return r;
}

}  // namespace

EpeReport epe(const model::DisplacementField& pred, const model::FlowField& truth, int margin) {
  return evaluate(pred, truth.width(), truth.height(), margin, [&](std::size_t, model::Pos p) {
    if (p.x < 0 || p.y < 0 || p.x >= truth.width() || p.y >= truth.height())
      throw BoundsError("prediction position outside the ground-truth field");
    return truth.at(p.x, p.y);
  });
}

EpeReport epe(const model::DisplacementField& pred, const model::DisplacementField& truth, int width, int height,
              int margin) {
  if (pred.positions() != truth.positions()) throw ShapeError("fields are on different lattices");
  return evaluate(pred, width, height, margin, [&](std::size_t i, model::Pos) { return truth.vectors[i]; });
}

EpeSummary summarize(std::span<const EpeReport> reports) {
  EpeSummary s;
  double pooled = 0.0;
  double means = 0.0;
  for (const auto& r : reports) {
    for (double e : r.errors) pooled += e;
    means += r.mean;
    s.positions += r.count;
  }
  s.images = reports.size();
  if (s.positions > 0) s.pooled = pooled / static_cast<double>(s.positions);
  if (s.images > 0) s.per_image = means / static_cast<double>(s.images);
  return s;
}

void write_epe_csv(const std::filesystem::path& path, std::span<const EpeReport> reports) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path.string());
  out << "image,count,epe\n";
  char line[128];
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%zu,%.9g\n", i, reports[i].count, reports[i].mean);
    out << line;
  }
  const EpeSummary s = summarize(reports);
  std::snprintf(line, sizeof line, "pooled,%zu,%.9g\nper_image,%zu,%.9g\n", s.positions, s.pooled, s.images, s.per_image);
  out << line;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace v1motion::eval
