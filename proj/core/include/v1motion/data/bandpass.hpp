#pragma once

#include <vector>

#include "v1motion/model/image.hpp"

namespace v1motion::data {

struct BandpassSpec {
  double sigma_narrow = 1.0;
  double sigma_wide = 4.0;
  int kernel_size = 8;
};

/// Unit-sum sampled Gaussian with taps at offsets -size/2 .. size-1-size/2.
std::vector<double> gaussian_kernel(double sigma, int size);

/// Index into [0, n) by symmetric reflection (-1 -> 0, n -> n-1).
int reflect_index(int i, int n);

/// Separable convolution with `kernel` (tap t at offset t - size/2),
/// reflective borders.
model::Image convolve_separable(const model::Image& image, const std::vector<double>& kernel);

/// Difference of Gaussians: G(sigma_narrow) * I - G(sigma_wide) * I.
model::Image bandpass(const model::Image& image, const BandpassSpec& spec = {});

}  // namespace v1motion::data
