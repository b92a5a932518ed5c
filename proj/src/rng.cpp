// Apache License, Version 2.0, refer to LICENSE.txt

#include "tripclust/rng.hpp"

namespace tripclust {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::mt19937_64 make_substream(std::uint64_t seed, std::string_view name,
                               std::uint64_t index) {
  std::uint64_t state = seed ^ fnv1a(name);
  state ^= splitmix64(state) + index;
  const std::uint64_t a = splitmix64(state);
  const std::uint64_t b = splitmix64(state);
  const std::uint64_t c = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return std::mt19937_64(seq);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

}  // namespace tripclust
