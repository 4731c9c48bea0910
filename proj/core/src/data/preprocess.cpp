#include "v1motion/data/preprocess.hpp"

#include "v1motion/common/error.hpp"

namespace v1motion::data {

std::string to_string(Preprocess p) {
  switch (p) {
    case Preprocess::None: return "none";
    case Preprocess::MeanSubtract: return "mean";
    case Preprocess::Bandpass: return "bandpass";
  }
  return "none";
}

Preprocess preprocess_from_string(const std::string& name) {
  if (name == "none") return Preprocess::None;
  if (name == "mean") return Preprocess::MeanSubtract;
  if (name == "bandpass") return Preprocess::Bandpass;
  throw ConfigError("unknown preprocessing '" + name + "' (expected none, mean or bandpass)");
}

model::Image preprocess(const model::Image& image, Preprocess p, const BandpassSpec& spec) {
  switch (p) {
    case Preprocess::None: return image;
    case Preprocess::MeanSubtract: {
      model::Image out = image;
      if (out.empty()) return out;
      double mean = 0.0;
      for (double v : out.samples()) mean += v;
      mean /= static_cast<double>(out.size());
      for (double& v : out.samples()) v -= mean;
      return out;
    }
    case Preprocess::Bandpass: return bandpass(image, spec);
  }
  return image;
}

void preprocess_pairs(std::vector<SamplePair>& pairs, Preprocess p, const BandpassSpec& spec) {
  if (p == Preprocess::None) return;
  for (auto& pair : pairs) {
    pair.current = preprocess(pair.current, p, spec);
    pair.next = preprocess(pair.next, p, spec);
  }
}

}  // namespace v1motion::data
