#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace ceo::numerics {

/// Counter-based random stream (Philox4x32-10).
///
/// The 64-bit seed is the Philox key; the 128-bit counter is the pair
/// (stream_id, position). Two streams with the same (seed, stream_id) produce
/// bit-identical sequences regardless of which thread drives them, which is
/// what makes parallel Monte-Carlo runs reproducible. Streams are cheap to
/// construct and must not be shared between workers.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of 128-bit Philox blocks consumed so far.
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// One Philox4x32-10 block; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Derives a stream id from a tuple of integers (experiment tag, L, trial...).
std::uint64_t mix_stream_id(std::initializer_list<std::uint64_t> parts) noexcept;

}  // namespace ceo::numerics
