#pragma once

#include <cstdint>
#include <random>

namespace dspce {

using Engine = std::mt19937_64;

/// Seed record for a reproducible random stream. Equal (seed, stream_id) pairs
/// yield identical engines; distinct stream ids are decorrelated through seed_seq.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  Engine engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32), 0x5eedu};
    return Engine(seq);
  }

  RngStream substream(std::uint64_t id) const {
    return {seed, stream_id * 0x9e3779b97f4a7c15ull + id + 1};
  }
};

}  // namespace dspce
