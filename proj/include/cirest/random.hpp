#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>

namespace cirest {

/// Identifies one replication's random stream.
struct StreamSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t replication_index = 0;
};

/// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as
/// 1, 2, 3", SC'11). Output block i of stream (key, index) is
/// philox(key = master_seed, counter = (i, index)), so streams for distinct
/// replication indices are disjoint slices of one keyed bijection and can be
/// generated independently on any thread.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(StreamSeed seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  double normal() noexcept;

  const StreamSeed& seed() const noexcept { return seed_; }

 private:
  void refill() noexcept;

  StreamSeed seed_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;
  std::optional<double> spare_normal_;
};

/// Philox4x32-10 block function; exposed for the known-answer test.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finalizer applied to (seed, index); used to derive
/// independent master seeds for the cells of a study grid.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace cirest
