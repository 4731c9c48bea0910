#pragma once

#include <Eigen/Dense>
#include <optional>

namespace v1motion::analysis {

/// h(x, y) = A exp(-x'^2 / (2 sx^2) - y'^2 / (2 sy^2)) cos(2 pi f x' + phi)
/// with x' = (x - x0) cos(theta) + (y - y0) sin(theta),
///      y' = -(x - x0) sin(theta) + (y - y0) cos(theta).
/// Pixel (x, y) is column x, row y.
struct GaborParams {
  double amplitude = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double theta = 0.0;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double frequency = 0.0;  ///< cycles per pixel
  double phase = 0.0;

  static constexpr int kCount = 8;
  Eigen::Matrix<double, kCount, 1> vector() const;
  static GaborParams from_vector(const Eigen::Matrix<double, kCount, 1>& v);
};

struct GaborFit {
  GaborParams params;
  double r2 = 0.0;
  /// No start improved on its initial guess.
  bool low_quality = false;
};

/// Row-major p x p samples of h.
Eigen::VectorXd gabor_eval(const GaborParams& params, int patch);

/// Representative with A > 0, f >= 0, theta in [0, pi), phase in [0, 2 pi),
/// positive widths. Describes the same function.
GaborParams canonicalize(const GaborParams& params);

struct FitOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-8;
  double damping_factor = 3.0;
};

/// Levenberg-Marquardt least squares over all 8 parameters from four phase
/// starts seeded by the spectral peak and the energy centroid. Returns the
/// canonical best fit. Throws NumericError for a constant unit.
GaborFit fit_gabor(const Eigen::VectorXd& unit, int patch, const FitOptions& options = {});

/// 1 - SSE / SST.
double r_squared(const Eigen::VectorXd& data, const Eigen::VectorXd& model);

/// Half-magnitude spatial-frequency bandwidth in octaves,
/// log2((2 pi sx f + sqrt(2 ln 2)) / (2 pi sx f - sqrt(2 ln 2))).
/// Empty when 2 pi sx f <= sqrt(2 ln 2).
std::optional<double> bandwidth_octaves(const GaborParams& params);

/// Phase reduced modulo pi, then reflected into [0, pi/2].
double fold_phase(double phase);

}  // namespace v1motion::analysis
