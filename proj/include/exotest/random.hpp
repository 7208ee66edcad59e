#pragma once

#include <array>
#include <cstdint>

namespace exotest {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Stateless: the output is a pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

// Purpose tags keep simulation and bootstrap draws in disjoint streams.
enum class StreamDomain : std::uint32_t {
  kBootstrap = 1,
  kSimulation = 2,
};

// Identifies one independent stream of uniforms. Every (seed, domain, group,
// attempt) selects a Philox key; (replicate, item) plus a draw counter form the
// Philox counter. Two streams that differ in any field never share a block.
struct StreamId {
  std::uint64_t seed = 0;
  StreamDomain domain = StreamDomain::kBootstrap;
  std::uint64_t group = 0;      // e.g. a hash of the Monte Carlo design point
  std::uint32_t attempt = 0;    // retry index after a degenerate draw
  std::uint64_t replicate = 0;  // bootstrap replicate b or MC replication m
};

// Sequential uniform draws for one item (observation) within a stream.
// Each Philox block yields two doubles with 53 random bits each.
class UniformStream {
public:
  UniformStream(const StreamId& id, std::uint32_t item) noexcept;

  // Uniform on [0, 1).
  double next() noexcept;
  // Uniform on (0, 1); same stream position semantics as next().
  double next_open() noexcept;

private:
  PhiloxKey key_;
  PhiloxCounter counter_;
  std::array<double, 2> buffer_{};
  int buffered_ = 0;
};

// Mixes arbitrary 64-bit values into one (splitmix64 finalizer chain).
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept;

}  // namespace exotest
