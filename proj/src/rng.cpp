#include "pstop/rng.hpp"

#include <cmath>

namespace pstop::rng {
namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& x,
                       const std::array<std::uint32_t, 2>& k) {
  std::uint64_t p0 = std::uint64_t(kMult0) * x[0];
  std::uint64_t p1 = std::uint64_t(kMult1) * x[2];
  std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
  std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
  std::array<std::uint32_t, 4> x = counter;
  std::array<std::uint32_t, 2> k = key;
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    round_once(x, k);
  }
  return x;
}

counter_stream::counter_stream(std::uint64_t seed, std::uint64_t stream,
                               std::uint32_t channel)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
      stream_(stream),
      channel_(channel) {}

std::array<std::uint32_t, 4> counter_stream::next_block() {
  std::array<std::uint32_t, 4> counter = {
      std::uint32_t(index_), std::uint32_t(index_ >> 32),
      std::uint32_t(stream_), std::uint32_t(stream_ >> 32) ^ (channel_ << 24)};
  ++index_;
  return philox4x32(counter, key_);
}

double counter_stream::uniform() {
  if (block_pos_ >= 3) {  // need two words
    block_ = next_block();
    block_pos_ = 0;
  }
  std::uint64_t hi = block_[block_pos_];
  std::uint64_t lo = block_[block_pos_ + 1];
  block_pos_ += 2;
  std::uint64_t bits = (hi << 32) | lo;
  // 53 significand bits, offset into the open interval.
  return double(bits >> 11) * 0x1p-53 + 0x1p-54;
}

double counter_stream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double counter_stream::exponential(double rate) {
  return -std::log(uniform()) / rate;
}

}  // namespace pstop::rng
