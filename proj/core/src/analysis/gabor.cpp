#include "v1motion/analysis/gabor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "v1motion/common/error.hpp"

namespace v1motion::analysis {

namespace {

constexpr double kPi = std::numbers::pi;
using Vec8 = Eigen::Matrix<double, GaborParams::kCount, 1>;

double wrap(double a, double period) {
  a = std::fmod(a, period);
  if (a < 0) a += period;
  if (a >= period) a -= period;
  return a;
}

}  // namespace

Vec8 GaborParams::vector() const {
  Vec8 v;
  v << amplitude, x0, y0, theta, sigma_x, sigma_y, frequency, phase;
  return v;
}

GaborParams GaborParams::from_vector(const Vec8& v) { return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]}; }

Eigen::VectorXd gabor_eval(const GaborParams& g, int patch) {
  if (patch <= 0) throw ShapeError("patch size must be positive");
  Eigen::VectorXd out(static_cast<Eigen::Index>(patch) * patch);
  const double c = std::cos(g.theta);
  const double s = std::sin(g.theta);
  for (int y = 0; y < patch; ++y) {
    for (int x = 0; x < patch; ++x) {
      const double dx = x - g.x0;
      const double dy = y - g.y0;
      const double xp = dx * c + dy * s;
      const double yp = -dx * s + dy * c;
      const double env = std::exp(-xp * xp / (2.0 * g.sigma_x * g.sigma_x) - yp * yp / (2.0 * g.sigma_y * g.sigma_y));
      out[y * patch + x] = g.amplitude * env * std::cos(2.0 * kPi * g.frequency * xp + g.phase);
    }
  }
  return out;
}

GaborParams canonicalize(const GaborParams& in) {
  GaborParams g = in;
  g.sigma_x = std::abs(g.sigma_x);
  g.sigma_y = std::abs(g.sigma_y);
  if (g.frequency < 0) {
    g.frequency = -g.frequency;
    g.phase = -g.phase;
  }
  if (g.amplitude < 0) {
    g.amplitude = -g.amplitude;
    g.phase += kPi;
  }
  // theta -> theta + pi flips x' and y', which maps phi to -phi.
  const double t = wrap(g.theta, 2.0 * kPi);
  if (t >= kPi) {
    g.theta = t - kPi;
    g.phase = -g.phase;
  } else {
    g.theta = t;
  }
  g.phase = wrap(g.phase, 2.0 * kPi);
  return g;
}

double r_squared(const Eigen::VectorXd& data, const Eigen::VectorXd& model) {
  if (data.size() != model.size()) throw ShapeError("r_squared operands differ in length");
  const double mean = data.mean();
  const double sst = (data.array() - mean).square().sum();
  const double sse = (data - model).squaredNorm();
  if (sst <= 0.0) throw NumericError("r_squared of a constant signal");
  return 1.0 - sse / sst;
}

std::optional<double> bandwidth_octaves(const GaborParams& g) {
  const double a = 2.0 * kPi * std::abs(g.sigma_x) * std::abs(g.frequency);
  const double b = std::sqrt(2.0 * std::log(2.0));
  if (!(a > b) || !std::isfinite(a)) return std::nullopt;
  return std::log2((a + b) / (a - b));
}

double fold_phase(double phase) {
  const double psi = wrap(phase, kPi);
  return std::min(psi, kPi - psi);
}

namespace {

// Residuals (model - data) and the analytic Jacobian.
void evaluate(const Vec8& p, int patch, const Eigen::VectorXd& data, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
  const double A = p[0], x0 = p[1], y0 = p[2], th = p[3], sx = p[4], sy = p[5], f = p[6], ph = p[7];
  const double c = std::cos(th);
  const double s = std::sin(th);
  const Eigen::Index n = static_cast<Eigen::Index>(patch) * patch;
  r.resize(n);
  if (J) J->resize(n, GaborParams::kCount);
  for (int y = 0; y < patch; ++y) {
    for (int x = 0; x < patch; ++x) {
      const Eigen::Index i = static_cast<Eigen::Index>(y) * patch + x;
      const double dx = x - x0;
      const double dy = y - y0;
      const double xp = dx * c + dy * s;
      const double yp = -dx * s + dy * c;
      const double E = std::exp(-xp * xp / (2.0 * sx * sx) - yp * yp / (2.0 * sy * sy));
      const double arg = 2.0 * kPi * f * xp + ph;
      const double C = std::cos(arg);
      const double S = std::sin(arg);
      r[i] = A * E * C - data[i];
      if (!J) continue;
      const double d_xp = A * E * (-xp / (sx * sx) * C - 2.0 * kPi * f * S);
      const double d_yp = A * E * (-yp / (sy * sy) * C);
      auto row = J->row(i);
      row[0] = E * C;
      row[1] = d_xp * (-c) + d_yp * s;
      row[2] = d_xp * (-s) + d_yp * (-c);
      row[3] = d_xp * yp + d_yp * (-xp);
      row[4] = A * E * C * xp * xp / (sx * sx * sx);
      row[5] = A * E * C * yp * yp / (sy * sy * sy);
      row[6] = -A * E * S * 2.0 * kPi * xp;
      row[7] = -A * E * S;
    }
  }
}

struct LmOutcome {
  Vec8 params;
  double sse;
  bool improved;
};

LmOutcome levenberg_marquardt(Vec8 p, int patch, const Eigen::VectorXd& data, const FitOptions& opt) {
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  evaluate(p, patch, data, r, &J);
  double sse = r.squaredNorm();
  const double initial = sse;
  double lambda = 1e-3;
  Eigen::VectorXd r_trial;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Eigen::Matrix<double, 8, 8> JtJ = J.transpose() * J;
    const Vec8 g = J.transpose() * r;
    bool accepted = false;
    Vec8 step = Vec8::Zero();
    while (lambda < 1e16) {
      Eigen::Matrix<double, 8, 8> A = JtJ;
      for (int k = 0; k < 8; ++k) A(k, k) += lambda * std::max(JtJ(k, k), 1e-12);
      step = A.ldlt().solve(-g);
      const Vec8 trial = p + step;
      if (trial.allFinite() && trial[4] != 0.0 && trial[5] != 0.0) {
        evaluate(trial, patch, data, r_trial, nullptr);
        const double s = r_trial.squaredNorm();
        if (std::isfinite(s) && s < sse) {
          p = trial;
          sse = s;
          lambda = std::max(lambda / opt.damping_factor, 1e-15);
          accepted = true;
          break;
        }
      }
      lambda *= opt.damping_factor;
    }
    if (!accepted) break;
    if (step.norm() <= opt.relative_tolerance * (p.norm() + opt.relative_tolerance)) break;
    evaluate(p, patch, data, r, &J);
  }
  return {p, sse, sse < initial};
}

struct SpectralPeak {
  double fx;
  double fy;
};

// Peak of the DFT magnitude of the mean-free unit on a 4x oversampled
// frequency grid, restricted to the half plane fx > 0 or (fx = 0, fy > 0).
SpectralPeak spectral_peak(const Eigen::VectorXd& unit, int patch) {
  const double mean = unit.mean();
  const int n = 4 * patch;
  double best = -1.0;
  SpectralPeak peak{1.0 / patch, 0.0};
  for (int u = 0; u <= n / 2; ++u) {
    for (int v = -n / 2; v <= n / 2; ++v) {
      if (u == 0 && v <= 0) continue;
      const double fx = static_cast<double>(u) / n;
      const double fy = static_cast<double>(v) / n;
      double re = 0.0, im = 0.0;
      for (int y = 0; y < patch; ++y) {
        for (int x = 0; x < patch; ++x) {
          const double a = unit[y * patch + x] - mean;
          const double arg = -2.0 * kPi * (fx * x + fy * y);
          re += a * std::cos(arg);
          im += a * std::sin(arg);
        }
      }
      const double mag = re * re + im * im;
      if (mag > best) {
        best = mag;
        peak = {fx, fy};
      }
    }
  }
  return peak;
}

}  // namespace

GaborFit fit_gabor(const Eigen::VectorXd& unit, int patch, const FitOptions& options) {
  if (unit.size() != static_cast<Eigen::Index>(patch) * patch) throw ShapeError("unit length must be p*p");
  if (!unit.allFinite()) throw NumericError("unit has non-finite entries");
  const double sst = (unit.array() - unit.mean()).square().sum();
  // Rounding in the mean leaves a tiny positive SST for constant units.
  if (!(sst > 1e-20 * unit.squaredNorm())) throw NumericError("cannot fit a constant unit");

  // Energy centroid and spread.
  const Eigen::ArrayXd energy = unit.array().square();
  const double total = energy.sum();
  double cx = 0.0, cy = 0.0;
  for (int y = 0; y < patch; ++y)
    for (int x = 0; x < patch; ++x) {
      cx += energy[y * patch + x] * x;
      cy += energy[y * patch + x] * y;
    }
  cx /= total;
  cy /= total;

  const SpectralPeak peak = spectral_peak(unit, patch);
  const double f0 = std::hypot(peak.fx, peak.fy);
  const double th0 = std::atan2(peak.fy, peak.fx);
  const double c = std::cos(th0);
  const double s = std::sin(th0);
  double mxx = 0.0, myy = 0.0;
  for (int y = 0; y < patch; ++y)
    for (int x = 0; x < patch; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      const double xp = dx * c + dy * s;
      const double yp = -dx * s + dy * c;
      mxx += energy[y * patch + x] * xp * xp;
      myy += energy[y * patch + x] * yp * yp;
    }
  // A squared Gaussian envelope exp(-u^2 / s^2) has second moment s^2 / 2.
  const double sx0 = std::clamp(std::sqrt(2.0 * mxx / total), 0.5, static_cast<double>(patch));
  const double sy0 = std::clamp(std::sqrt(2.0 * myy / total), 0.5, static_cast<double>(patch));
  const double a0 = unit.cwiseAbs().maxCoeff();

  GaborFit best;
  best.r2 = -std::numeric_limits<double>::infinity();
  bool any_improved = false;
  for (int start = 0; start < 4; ++start) {
    const GaborParams init{a0, cx, cy, th0, sx0, sy0, f0, start * kPi / 2.0};
    const LmOutcome out = levenberg_marquardt(init.vector(), patch, unit, options);
    any_improved = any_improved || out.improved;
    const double r2 = 1.0 - out.sse / sst;
    if (r2 > best.r2) {
      best.r2 = r2;
      best.params = canonicalize(GaborParams::from_vector(out.params));
    }
  }
  best.low_quality = !any_improved;
  return best;
}

}  // namespace v1motion::analysis
