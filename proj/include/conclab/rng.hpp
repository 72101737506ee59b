#pragma once

#include <cmath>
#include <cstdint>

namespace conclab {

// Counter-based pseudo-random stream. The sequence is fully determined by
// (master_seed, stream_index), so per-trial streams replay identically no
// matter how trials are scheduled across workers.
class RngStream {
 public:
  RngStream(uint64_t master_seed, uint64_t stream_index) {
    state_ = mix(master_seed ^ 0x9e3779b97f4a7c15ull);
    state_ = mix(state_ ^ mix(stream_index + 0xbf58476d1ce4e5b9ull));
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // uniform on [0,1), 53-bit resolution
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on {0,...,n-1} via the multiply-shift map
  uint32_t next_index(uint32_t n) {
    return uint32_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // standard normal, Box-Muller with the second value cached
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 == 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.28318530717958647692 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // exponential with rate 1
  double next_exponential() { return -std::log1p(-next_double()); }

 private:
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  uint64_t state_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace conclab
