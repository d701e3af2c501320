#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sle {

// Counter-based Philox4x32-10 (Salmon, Moraes, Dror, Shaw; SC'11).
// key = (seed, stream id), counter = block index. Every Monte Carlo path gets
// its own stream, so results do not depend on thread scheduling.
class Philox4x32 {
 public:
  Philox4x32(uint64_t seed, uint64_t stream) {
    key_[0] = static_cast<uint32_t>(seed);
    key_[1] = static_cast<uint32_t>(seed >> 32);
    ctr_[0] = 0;
    ctr_[1] = 0;
    ctr_[2] = static_cast<uint32_t>(stream);
    ctr_[3] = static_cast<uint32_t>(stream >> 32);
    refill();
  }

  static std::array<uint32_t, 4> block(std::array<uint32_t, 4> c, std::array<uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
      uint64_t p0 = static_cast<uint64_t>(0xD2511F53u) * c[0];
      uint64_t p1 = static_cast<uint64_t>(0xCD9E8D57u) * c[2];
      uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
      uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
      c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    return c;
  }

  uint32_t next_u32() {
    if (idx_ == 4) {
      if (++ctr_[0] == 0) ++ctr_[1];
      refill();
    }
    return out_[idx_++];
  }

  uint64_t next_u64() {
    uint64_t lo = next_u32();
    uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform on (0,1], 53-bit resolution; never returns 0 so log() is safe.
  double next_double() {
    uint64_t r = next_u64() >> 11;
    return (static_cast<double>(r) + 1.0) * 0x1.0p-53;
  }

 private:
  void refill() {
    out_ = block(ctr_, key_);
    idx_ = 0;
  }

  std::array<uint32_t, 4> ctr_{};
  std::array<uint32_t, 2> key_{};
  std::array<uint32_t, 4> out_{};
  int idx_ = 0;
};

// Standard normals via Box-Muller on top of a Philox stream.
class GaussianStream {
 public:
  GaussianStream(uint64_t seed, uint64_t stream) : rng_(seed, stream) {}

  double next() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = rng_.next_double();
    double u2 = rng_.next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(th);
    have_cached_ = true;
    return r * std::cos(th);
  }

  double uniform() { return rng_.next_double(); }

 private:
  Philox4x32 rng_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace sle
