#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace stpa {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent substream seed derived from a master seed and a stream name.
inline std::uint64_t stream_seed(std::uint64_t master, std::string_view name) {
  return splitmix64(master ^ splitmix64(fnv1a64(name)));
}

/// Substream seed for the i-th item (realization, trial) of a stream.
inline std::uint64_t stream_seed(std::uint64_t master, std::string_view name, std::uint64_t index) {
  return splitmix64(stream_seed(master, name) + splitmix64(index + 1));
}

}  // namespace stpa
