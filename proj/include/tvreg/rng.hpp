#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tvreg {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a substream key from a base seed and a path of labels
/// (role, replication index, ...). Different paths give unrelated keys.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t key = mix64(seed);
  for (std::uint64_t label : path) key = mix64(key ^ mix64(label + 0x632be59bd9b4e019ULL));
  return key;
}

/// Roles of the independent random streams used by the generators.
enum class StreamRole : std::uint64_t {
  Regressor = 1,   // MA innovations xi
  Noise = 2,       // regression errors eta
  Replication = 3  // per-replication seed derivation in the study harness
};

/// Engine for one substream. Output depends only on (seed, role, index).
inline std::mt19937_64 make_stream(std::uint64_t seed, StreamRole role, std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(seed, {static_cast<std::uint64_t>(role), index}));
}

}  // namespace tvreg
