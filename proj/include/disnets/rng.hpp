#pragma once

#include <cstdint>
#include <random>

namespace disnets {

using Rng = std::mt19937_64;

/// Identifies an independent random substream. Each (stream, index) pair maps to
/// its own generator so that, e.g., adding a UE does not perturb the others.
enum class Stream : std::uint64_t {
  Layout = 1,
  Shadowing = 2,
  TrafficBounds = 3,
  TrafficArrivals = 4,
  TrafficMix = 5,
  NetInit = 6,
  Agent = 7,
  RandomK = 8,
  Test = 99,
};

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0);

inline Rng make_stream(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

}  // namespace disnets
