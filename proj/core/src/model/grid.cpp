#include "v1motion/model/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "v1motion/common/error.hpp"

namespace v1motion::model {

void GridSpec::validate() const {
  if (patch <= 0) throw ConfigError("patch size must be positive");
  if (stride <= 0 || stride > patch) throw ConfigError("stride must satisfy 0 < stride <= patch");
}

PositionGrid GridSpec::positions(int width, int height) const {
  return interior_positions(width, height, 0, 0);
}

PositionGrid GridSpec::interior_positions(int width, int height, int support_radius, int margin) const {
  validate();
  auto axis = [&](int extent) {
    std::vector<int> out;
    for (int c = min_center(); c <= max_center(extent); c += stride) {
      const bool support_ok = c - support_radius >= min_center() && c + support_radius <= max_center(extent);
      const bool margin_ok = c >= margin && c <= extent - 1 - margin;
      if (support_ok && margin_ok) out.push_back(c);
    }
    return out;
  };
  const auto xs = axis(width);
  const auto ys = axis(height);
  PositionGrid grid;
  grid.nx = static_cast<int>(xs.size());
  grid.ny = static_cast<int>(ys.size());
  grid.positions.reserve(xs.size() * ys.size());
  for (int y : ys) {
    for (int x : xs) grid.positions.push_back({x, y});
  }
  return grid;
}

DisplacementGrid::DisplacementGrid(double lo, double hi, double step) : lo_(lo), hi_(hi), step_(step) {
  if (!(step > 0.0)) throw ConfigError("displacement step must be positive");
  if (!(lo < hi)) throw ConfigError("displacement range requires lo < hi");
  const double count = (hi - lo) / step;
  if (std::abs(count - std::round(count)) > 1e-9) {
    throw ConfigError("displacement range must be a whole number of steps");
  }
  n_ = static_cast<int>(std::lround(count)) + 1;

  order_.resize(size());
  for (std::size_t c = 0; c < order_.size(); ++c) order_[c] = c;
  std::stable_sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
    const Vec2 va = candidate(a);
    const Vec2 vb = candidate(b);
    const double na = va.dx * va.dx + va.dy * va.dy;
    const double nb = vb.dx * vb.dx + vb.dy * vb.dy;
    if (na != nb) return na < nb;
    return a < b;  // lexicographic (dx, dy) by construction of the index
  });
}

Vec2 DisplacementGrid::candidate(std::size_t c) const {
  const std::size_t i = c / n_;
  const std::size_t j = c % n_;
  return {lo_ + static_cast<double>(i) * step_, lo_ + static_cast<double>(j) * step_};
}

std::size_t DisplacementGrid::index(Vec2 delta) const {
  auto axis = [&](double v) {
    const double a = (v - lo_) / step_;
    const double r = std::round(a);
    if (std::abs(a - r) > 1e-6 || r < 0 || r >= n_) {
      throw LookupError("displacement component " + std::to_string(v) + " is not on the candidate grid");
    }
    return static_cast<std::size_t>(r);
  };
  return axis(delta.dx) * n_ + axis(delta.dy);
}

std::size_t DisplacementGrid::nearest(Vec2 delta) const {
  auto axis = [&](double v) {
    const double a = std::round((v - lo_) / step_);
    return static_cast<std::size_t>(std::clamp(a, 0.0, static_cast<double>(n_ - 1)));
  };
  return axis(delta.dx) * n_ + axis(delta.dy);
}

std::vector<Pos> mixing_support(int radius, int step) {
  if (radius < 0 || step <= 0 || radius % step != 0) {
    throw ConfigError("mixing support needs radius >= 0, step > 0 and radius divisible by step");
  }
  std::vector<Pos> out;
  for (int dy = -radius; dy <= radius; dy += step) {
    for (int dx = -radius; dx <= radius; dx += step) out.push_back({dx, dy});
  }
  return out;
}

int support_radius(const std::vector<Pos>& support) {
  int r = 0;
  for (const Pos& o : support) r = std::max({r, std::abs(o.x), std::abs(o.y)});
  return r;
}

}  // namespace v1motion::model
