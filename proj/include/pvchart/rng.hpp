#pragma once

#include <cstdint>

#include "pvchart/normal.hpp"

namespace pvchart {

// Keyed SplitMix64. A generator is addressed by (seed, stream); replication
// substreams are derived as stream = (rep << 3) | channel, so results do not
// depend on thread scheduling or platform.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(seed + 0x9e3779b97f4a7c15ull * mix(stream + 0x632be59bd9b4e019ull))) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1); safe to pass through norm_quantile.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal() { return norm_quantile(next_unit()); }

  double next_cauchy() { return std::tan(3.14159265358979323846 * (next_unit() - 0.5)); }

  double next_chisq1() {
    const double z = next_normal();
    return z * z;
  }

  // Inclusive on both endpoints.
  int next_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
    return z ^ (z >> 33);
  }

  std::uint64_t state_;
};

}  // namespace pvchart
