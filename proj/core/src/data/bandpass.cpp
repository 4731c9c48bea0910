#include "v1motion/data/bandpass.hpp"

#include <cmath>

#include "v1motion/common/error.hpp"

namespace v1motion::data {

std::vector<double> gaussian_kernel(double sigma, int size) {
  if (!(sigma > 0.0) || size < 1) throw ConfigError("gaussian kernel needs sigma > 0 and size >= 1");
  std::vector<double> k(static_cast<std::size_t>(size));
  double sum = 0.0;
  for (int t = 0; t < size; ++t) {
    const double o = t - size / 2;
    k[static_cast<std::size_t>(t)] = std::exp(-o * o / (2.0 * sigma * sigma));
    sum += k[static_cast<std::size_t>(t)];
  }
  for (double& v : k) v /= sum;
  return k;
}

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

model::Image convolve_separable(const model::Image& image, const std::vector<double>& kernel) {
  const int w = image.width();
  const int h = image.height();
  const int size = static_cast<int>(kernel.size());
  const int half = size / 2;
  model::Image tmp(w, h);
  model::Image out(w, h);
  // out(x) = sum_t k[t] in(x - (t - half))
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = 0; t < size; ++t) acc += kernel[static_cast<std::size_t>(t)] * image.at(reflect_index(x - (t - half), w), y);
      tmp.at(x, y) = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = 0; t < size; ++t) acc += kernel[static_cast<std::size_t>(t)] * tmp.at(x, reflect_index(y - (t - half), h));
      out.at(x, y) = acc;
    }
  }
  return out;
}

model::Image bandpass(const model::Image& image, const BandpassSpec& spec) {
  if (image.width() < spec.kernel_size / 2 || image.height() < spec.kernel_size / 2)
    throw ShapeError("bandpass: kernel does not fit the image");
  const auto narrow = convolve_separable(image, gaussian_kernel(spec.sigma_narrow, spec.kernel_size));
  const auto wide = convolve_separable(image, gaussian_kernel(spec.sigma_wide, spec.kernel_size));
  model::Image out(image.width(), image.height());
  for (std::size_t i = 0; i < out.size(); ++i) out.samples()[i] = narrow.samples()[i] - wide.samples()[i];
  return out;
}

}  // namespace v1motion::data
