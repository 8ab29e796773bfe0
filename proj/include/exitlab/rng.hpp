#pragma once

#include <array>
#include <cstdint>

namespace exitlab::rng {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011). A
// (seed, stream) pair names an independent substream; draws are a pure
// function of (seed, stream, position). Parallel samplers key one stream
// per sample index, so results are independent of thread scheduling.
class Philox {
 public:
  Philox(uint64_t seed, uint64_t stream);

  uint32_t next_u32();
  uint64_t next_u64();
  // Uniform, strictly inside (0,1), 53-bit resolution.
  double next_unit();
  // Standard normal via Box-Muller; pairs are cached across calls.
  double next_gaussian();
  // Uniform direction on the unit sphere in R^n, n = 2 or 3 (third
  // component 0 for n = 2). Fixed draw count per call: 1 for n=2, 2 for n=3.
  std::array<double, 3> next_direction(int n);

  // One 10-round block; exposed for known-answer tests.
  static std::array<uint32_t, 4> block(std::array<uint32_t, 4> counter,
                                       std::array<uint32_t, 2> key);

 private:
  void refill();
  std::array<uint32_t, 4> counter_;
  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double gauss_cache_ = 0.0;
  bool has_gauss_ = false;
};

}  // namespace exitlab::rng
