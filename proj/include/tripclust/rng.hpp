// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tripclust {

// All randomness in a run flows from one top-level seed through named
// sub-streams ("init", "sweep", "generator", ...), so adding draws to one
// consumer never perturbs the others. An optional index gives per-item
// streams (e.g. one per generated passenger) that are independent of the
// thread that happens to produce the item.
std::mt19937_64 make_substream(std::uint64_t seed, std::string_view name,
                               std::uint64_t index = 0);

// Uniform in [0, 1) from the top 53 bits; stable across standard libraries,
// unlike std::uniform_real_distribution.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; n must be positive.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

}  // namespace tripclust
