#include "exitlab/rng.hpp"

#include <cmath>

namespace exitlab::rng {

namespace {
constexpr uint32_t kW32A = 0x9E3779B9u;
constexpr uint32_t kW32B = 0xBB67AE85u;
constexpr uint32_t kM4x32A = 0xD2511F53u;
constexpr uint32_t kM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(uint32_t a, uint32_t b, uint32_t* lo, uint32_t* hi) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  *lo = static_cast<uint32_t>(p);
  *hi = static_cast<uint32_t>(p >> 32);
}

inline void one_round(std::array<uint32_t, 4>& ctr,
                      const std::array<uint32_t, 2>& key) {
  uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kM4x32A, ctr[0], &lo0, &hi0);
  mul_hi_lo(kM4x32B, ctr[2], &lo1, &hi1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}
}  // namespace

std::array<uint32_t, 4> Philox::block(std::array<uint32_t, 4> counter,
                                      std::array<uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    one_round(counter, key);
    if (r < 9) {
      key[0] += kW32A;
      key[1] += kW32B;
    }
  }
  return counter;
}

Philox::Philox(uint64_t seed, uint64_t stream) {
  key_ = {static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)};
  // Stream id lives in the high counter words; the block position in the low
  // words never carries into it in any realistic run (2^64 blocks).
  counter_ = {0, 0, static_cast<uint32_t>(stream),
              static_cast<uint32_t>(stream >> 32)};
}

void Philox::refill() {
  buf_ = block(counter_, key_);
  buf_pos_ = 0;
  if (++counter_[0] == 0) ++counter_[1];
}

uint32_t Philox::next_u32() {
  if (buf_pos_ >= 4) refill();
  return buf_[static_cast<size_t>(buf_pos_++)];
}

uint64_t Philox::next_u64() {
  uint64_t lo = next_u32();
  uint64_t hi = next_u32();
  return lo | (hi << 32);
}

double Philox::next_unit() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Philox::next_gaussian() {
  if (has_gauss_) {
    has_gauss_ = false;
    return gauss_cache_;
  }
  double u1 = next_unit();
  double u2 = next_unit();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  gauss_cache_ = r * std::sin(a);
  has_gauss_ = true;
  return r * std::cos(a);
}

std::array<double, 3> Philox::next_direction(int n) {
  if (n == 2) {
    double a = 2.0 * M_PI * next_unit();
    return {std::cos(a), std::sin(a), 0.0};
  }
  double z = 2.0 * next_unit() - 1.0;
  double a = 2.0 * M_PI * next_unit();
  double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(a), s * std::sin(a), z};
}

}  // namespace exitlab::rng
