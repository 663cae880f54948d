#pragma once

#include <cstdint>
#include <random>

namespace nsgp::detail {

// Independent, reproducible stream for (seed, stream, purpose).
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

// Purpose tags keep streams used by different stages apart.
enum StreamPurpose : std::uint64_t {
  kMapRestart = 1,
  kNutsChain = 2,
  kChainInit = 3,
  kPrediction = 4,
  kDatasetNoise = 5,
  kSplit = 6,
  kSubsample = 7,
};

}  // namespace nsgp::detail
