#pragma once

#include <string>

#include "v1motion/data/bandpass.hpp"
#include "v1motion/data/sample.hpp"
#include "v1motion/model/image.hpp"

namespace v1motion::data {

/// Optional input conditioning applied to every frame before encoding.
enum class Preprocess {
  None,
  MeanSubtract,  ///< subtract the per-image mean
  Bandpass,      ///< difference of Gaussians, see `bandpass`
};

std::string to_string(Preprocess p);
/// "none", "mean" or "bandpass"; throws ConfigError otherwise.
Preprocess preprocess_from_string(const std::string& name);

model::Image preprocess(const model::Image& image, Preprocess p, const BandpassSpec& spec = {});

/// Both frames of every pair; ground-truth fields are left untouched.
void preprocess_pairs(std::vector<SamplePair>& pairs, Preprocess p, const BandpassSpec& spec = {});

}  // namespace v1motion::data
