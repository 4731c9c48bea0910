#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <vector>

#include "v1motion/model/image.hpp"

namespace v1motion::data {

/// One training triplet: I_t, the per-pixel field, and I_{t+1} with
/// I_{t+1}(x) = I_t(x - delta(x)).
struct SamplePair {
  model::Image current;
  model::Image next;
  model::FlowField flow;
  std::uint64_t seed = 0;

  friend bool operator==(const SamplePair&, const SamplePair&) = default;
};

struct Dataset {
  std::vector<SamplePair> pairs;
  nlohmann::json spec = nlohmann::json::object();  ///< generator settings, echoed to the manifest

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

}  // namespace v1motion::data
