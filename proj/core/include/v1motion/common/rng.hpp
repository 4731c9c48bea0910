#pragma once

#include <cstdint>
#include <random>

namespace v1motion {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent per-item seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for item `index` of a run seeded with `seed`. Independent of how
/// items are scheduled across threads.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

inline Rng make_rng(std::uint64_t seed, std::uint64_t index) { return Rng(stream_seed(seed, index)); }

/// Uniform double in [lo, hi). Implemented directly on the engine output so
/// streams are identical across standard library implementations.
double uniform(Rng& rng, double lo, double hi);

/// Standard normal via Box-Muller on `uniform`.
double normal(Rng& rng);

/// Uniform integer in [0, n).
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace v1motion
