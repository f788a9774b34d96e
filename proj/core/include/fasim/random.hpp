#pragma once

#include <array>
#include <cstdint>

#include "fasim/types.hpp"

namespace fasim {

/// Identifies one reproducible pseudo-random stream.
struct SeedSpec {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_id = 0;

  /// A new root derived from (root_seed, stream_id) with its own stream id.
  /// Lets nested consumers (replication -> bootstrap replicate) keep
  /// disjoint streams without coordinating.
  SeedSpec child(std::uint64_t id) const noexcept;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Philox4x32-10 counter-based generator. The key is derived from the root
/// seed and the stream id occupies the upper half of the counter, so every
/// (root_seed, stream_id) pair yields an independent, schedule-free sequence.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  explicit Philox4x32(SeedSpec seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return 0xFFFFFFFFu; }

  result_type operator()() noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int cursor_ = 4;
};

/// Distribution helpers on top of Philox. Implemented in-repo so that draws
/// are identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(SeedSpec seed) noexcept : engine_(seed) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;
  /// Student t with a positive integer number of degrees of freedom.
  double student_t(int df);
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

  void fill_normal(Eigen::Ref<Matrix> out) noexcept;

 private:
  Philox4x32 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fasim
