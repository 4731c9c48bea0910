#include "v1motion/analysis/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "v1motion/common/error.hpp"
#include "v1motion/common/parallel.hpp"

namespace v1motion::analysis {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::size_t Histogram::total() const {
  std::size_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::size_t Histogram::mode() const {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

Histogram make_histogram(std::span<const double> values, double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw ConfigError("histogram needs bins >= 1 and hi > lo");
  Histogram h{lo, hi, std::vector<std::size_t>(static_cast<std::size_t>(bins), 0)};
  const double width = (hi - lo) / bins;
  for (double v : values) {
    const int b = std::clamp(static_cast<int>(std::floor((v - lo) / width)), 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

std::vector<UnitRecord> fit_units(const model::Encoder& enc, int threads, const FitOptions& options) {
  std::vector<UnitRecord> out(static_cast<std::size_t>(enc.rows()));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    UnitRecord& u = out[i];
    u.unit = static_cast<int>(i);
    u.block = u.unit / enc.block_dim();
    u.member = u.unit % enc.block_dim();
    const Eigen::VectorXd row = enc.weights().row(static_cast<Eigen::Index>(i)).transpose();
    u.fit = fit_gabor(row, enc.patch(), options);
    const auto& g = u.fit.params;
    u.bandwidth = bandwidth_octaves(g);
    u.nx = g.sigma_x * g.frequency;
    u.ny = g.sigma_y * g.frequency;
    u.folded_phase = fold_phase(g.phase);
  });
  return out;
}

double aligned_phase_difference(const GaborParams& a, const GaborParams& b_in) {
  GaborParams b = b_in;
  // Pick the orientation representative of b closest to a.
  double dt = b.theta - a.theta;
  if (dt > kPi / 2) {
    b.theta -= kPi;
    b.phase = -b.phase;
  } else if (dt < -kPi / 2) {
    b.theta += kPi;
    b.phase = -b.phase;
  }
  // Carrier of b evaluated relative to a's center.
  const double nxv = std::cos(b.theta);
  const double nyv = std::sin(b.theta);
  const double shift = (a.x0 - b.x0) * nxv + (a.y0 - b.y0) * nyv;
  const double phase_b = b.phase + 2.0 * kPi * b.frequency * shift;
  return fold_phase(phase_b - a.phase);
}

PairSummary quadrature_stats(const model::Encoder& enc, std::span<const UnitRecord> units, double min_r2) {
  if (units.size() != static_cast<std::size_t>(enc.rows())) throw ShapeError("one record per encoder row required");
  PairSummary out;
  const int d = enc.block_dim();
  for (int k = 0; k < enc.num_blocks(); ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const auto& a = units[static_cast<std::size_t>(k * d + i)];
        const auto& b = units[static_cast<std::size_t>(k * d + j)];
        if (a.fit.r2 < min_r2 || b.fit.r2 < min_r2) {
          ++out.skipped;
          continue;
        }
        PairRecord p;
        p.block = k;
        p.first = a.unit;
        p.second = b.unit;
        p.frequency_difference = std::abs(a.fit.params.frequency - b.fit.params.frequency);
        const double dt = std::fmod(std::abs(a.fit.params.theta - b.fit.params.theta), kPi);
        p.orientation_difference = std::min(dt, kPi - dt);
        p.phase_difference = aligned_phase_difference(a.fit.params, b.fit.params);
        out.pairs.push_back(p);
      }
    }
  }
  return out;
}

PopulationStats population_stats(std::span<const UnitRecord> units, const PairSummary& pairs) {
  PopulationStats s;
  s.units = units.size();
  std::vector<double> r2, bw, phase, dphi;
  std::size_t good = 0;
  for (const auto& u : units) {
    r2.push_back(u.fit.r2);
    if (u.fit.r2 > 0.7) ++good;
    if (u.bandwidth) bw.push_back(*u.bandwidth);
    else ++s.bandwidth_undefined;
    phase.push_back(u.folded_phase);
  }
  if (!r2.empty()) {
    double mean = 0.0;
    for (double v : r2) mean += v;
    mean /= static_cast<double>(r2.size());
    double var = 0.0;
    for (double v : r2) var += (v - mean) * (v - mean);
    s.r2_mean = mean;
    s.r2_std = std::sqrt(var / static_cast<double>(r2.size()));
    s.fraction_r2_above_07 = static_cast<double>(good) / static_cast<double>(r2.size());
  }
  for (const auto& p : pairs.pairs) dphi.push_back(p.phase_difference);
  s.bandwidth = make_histogram(bw, 0.0, 3.0, 6);
  s.phase = make_histogram(phase, 0.0, kPi / 2, 6);
  s.pair_phase = make_histogram(dphi, 0.0, kPi / 2, 3);
  s.pairs = pairs.pairs.size();
  s.pairs_skipped = pairs.skipped;
  return s;
}

void write_units_csv(const std::filesystem::path& path, std::span<const UnitRecord> units) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path.string());
  out << "unit,block,member,amplitude,x0,y0,theta,sigma_x,sigma_y,frequency,phase,r2,bandwidth,nx,ny,folded_phase,"
         "low_quality\n";
  char line[512];
  for (const auto& u : units) {
    const auto& g = u.fit.params;
    char bw[32] = "";
    if (u.bandwidth) std::snprintf(bw, sizeof bw, "%.9g", *u.bandwidth);
    std::snprintf(line, sizeof line, "%d,%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s,%.9g,%.9g,%.9g,%d\n",
                  u.unit, u.block, u.member, g.amplitude, g.x0, g.y0, g.theta, g.sigma_x, g.sigma_y, g.frequency,
                  g.phase, u.fit.r2, bw, u.nx, u.ny, u.folded_phase, u.fit.low_quality ? 1 : 0);
    out << line;
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_pairs_csv(const std::filesystem::path& path, std::span<const PairRecord> pairs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path.string());
  out << "block,first,second,frequency_difference,orientation_difference,phase_difference\n";
  char line[256];
  for (const auto& p : pairs) {
    std::snprintf(line, sizeof line, "%d,%d,%d,%.9g,%.9g,%.9g\n", p.block, p.first, p.second, p.frequency_difference,
                  p.orientation_difference, p.phase_difference);
    out << line;
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace v1motion::analysis
