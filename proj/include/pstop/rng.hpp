#pragma once

#include <array>
#include <cstdint>

// Counter-based random numbers (Philox4x32-10).  Every draw is a pure
// function of (seed, stream, channel, index), so parallel path generation
// is reproducible regardless of scheduling: path i always consumes the
// same numbers, whether generated serially or by any number of threads.
namespace pstop::rng {

// One Philox4x32-10 block: four 32-bit words from a 128-bit counter and a
// 64-bit key.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// A deterministic stream of doubles.  `stream` identifies the path,
// `channel` separates independent uses within one path (increments,
// marks, horizon draws, ...).
class counter_stream {
 public:
  counter_stream(std::uint64_t seed, std::uint64_t stream, std::uint32_t channel);

  // Uniform on (0, 1); never returns 0 or 1.
  double uniform();
  // Standard normal (Box-Muller; caches the second variate).
  double normal();
  // Exponential with the given rate.
  double exponential(double rate);

  std::uint64_t stream_id() const { return stream_; }
  std::uint32_t channel() const { return channel_; }

 private:
  std::array<std::uint32_t, 4> next_block();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_ = 0;
  std::uint32_t channel_ = 0;
  std::uint64_t index_ = 0;

  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;  // consumed
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pstop::rng
