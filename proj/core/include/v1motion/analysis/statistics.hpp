#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "v1motion/analysis/gabor.hpp"
#include "v1motion/model/encoder.hpp"

namespace v1motion::analysis {

/// Fit of one encoder row.
struct UnitRecord {
  int unit = 0;    ///< row of W
  int block = 0;   ///< sub-vector k
  int member = 0;  ///< index within the sub-vector
  GaborFit fit;
  std::optional<double> bandwidth;
  double nx = 0.0;  ///< sigma_x * f
  double ny = 0.0;  ///< sigma_y * f
  double folded_phase = 0.0;
};

/// Two units of the same sub-vector.
struct PairRecord {
  int block = 0;
  int first = 0;
  int second = 0;
  double frequency_difference = 0.0;
  double orientation_difference = 0.0;  ///< angular distance modulo pi, in [0, pi/2]
  double phase_difference = 0.0;        ///< folded, in [0, pi/2]
};

/// Equal-width bins over [lo, hi]; values outside are clamped into the end bins.
struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;

  std::size_t total() const;
  /// Index of the fullest bin (first one on ties).
  std::size_t mode() const;
};

Histogram make_histogram(std::span<const double> values, double lo, double hi, int bins);

/// Fits every row of W, in parallel.
std::vector<UnitRecord> fit_units(const model::Encoder& enc, int threads = 1, const FitOptions& options = {});

/// Phase of `b` re-expressed in the frame of `a` (matching orientation sign
/// and center), minus the phase of `a`, folded into [0, pi/2].
double aligned_phase_difference(const GaborParams& a, const GaborParams& b);

struct PairSummary {
  std::vector<PairRecord> pairs;
  std::size_t skipped = 0;  ///< pairs with a member below the quality threshold
};

/// All within-sub-vector pairs whose fits both reach `min_r2`.
PairSummary quadrature_stats(const model::Encoder& enc, std::span<const UnitRecord> units, double min_r2 = 0.5);

struct PopulationStats {
  std::size_t units = 0;
  double r2_mean = 0.0;
  double r2_std = 0.0;
  double fraction_r2_above_07 = 0.0;
  Histogram bandwidth;             ///< octaves over [0, 3], defined bandwidths only
  std::size_t bandwidth_undefined = 0;
  Histogram phase;                 ///< folded phase over [0, pi/2], 6 bins
  Histogram pair_phase;            ///< folded phase difference over [0, pi/2], 3 bins
  std::size_t pairs = 0;
  std::size_t pairs_skipped = 0;
};

PopulationStats population_stats(std::span<const UnitRecord> units, const PairSummary& pairs);

void write_units_csv(const std::filesystem::path& path, std::span<const UnitRecord> units);
void write_pairs_csv(const std::filesystem::path& path, std::span<const PairRecord> pairs);

}  // namespace v1motion::analysis
