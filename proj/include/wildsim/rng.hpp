#pragma once

#include <cstdint>
#include <random>

namespace wildsim {

using Rng = std::mt19937_64;

// Named random streams. Every episode derives one engine per concern from
// (episode_seed, stream id), so results are reproducible bit-for-bit and do
// not depend on how episodes are scheduled across threads.
enum class RngStreamId : std::uint32_t {
  Env = 1,      // ignition geometry, spread noise, spotting, sensor noise
  Wind = 2,     // wind process
  Sampler = 3,  // scenario sampling inside drone lookaheads
  Policy = 4,   // reserved for randomized policies
};

inline Rng make_stream(std::uint64_t episode_seed, RngStreamId id) {
  std::seed_seq seq{static_cast<std::uint32_t>(episode_seed & 0xffffffffULL),
                    static_cast<std::uint32_t>(episode_seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return Rng(seq);
}

}  // namespace wildsim
