#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pdq {

/// Identifies one logical random stream: every Monte Carlo replica of every
/// experiment gets its own (master_seed, replica_index) pair, so runs are
/// reproducible bit-for-bit regardless of scheduling.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint32_t replica_index = 0;
};

namespace detail {

inline std::uint64_t splitmix64_step(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Derives the engine seed for one stream. Two rounds of splitmix64 over the
/// master seed xored with a multiple of the golden-ratio constant decorrelate
/// neighbouring indices.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t stream_index) {
  std::uint64_t z =
      master_seed ^ (0x9E3779B97F4A7C15ULL * (stream_index + 1));
  z = detail::splitmix64_step(z);
  z = detail::splitmix64_step(z);
  return z;
}

/// Per-replica random stream over mt19937_64. Distributions are hand-rolled
/// from raw 64-bit draws because the standard library's distribution objects
/// are not specified bit-for-bit across implementations.
class RngStream {
 public:
  explicit RngStream(SeedSpec seed)
      : RngStream(seed.master_seed, seed.replica_index) {}

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : eng_(derive_stream_seed(master_seed, stream_index)) {}

  std::uint64_t raw() { return eng_(); }

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform01() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential with the given rate; rate 0 yields +infinity.
  double exponential(double rate) { return -std::log(uniform01()) / rate; }

 private:
  std::mt19937_64 eng_;
};

// Fixed stream-index offsets so that distinct uses inside one experiment
// never collide on the same (master_seed, index) pair. Plain replica paths
// use the replica index directly (offset 0).
namespace stream_ns {
constexpr std::uint64_t kAux = 1ULL << 32;        // + shard index
constexpr std::uint64_t kBootstrap = 2ULL << 32;
constexpr std::uint64_t kPool = 3ULL << 32;
constexpr std::uint64_t kReference = 4ULL << 32;  // + shard index
}  // namespace stream_ns

}  // namespace pdq
