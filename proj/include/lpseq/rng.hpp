#pragma once

#include <cmath>
#include <cstdint>

namespace lpseq {

// Stateless 64-bit avalanche (splitmix64 finalizer).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based generator with cheap per-stream construction.
//
// Streams are derived by hashing (seed, stream_id), so stream k of a run can
// be created in O(1) without advancing through streams 0..k-1.  Work split
// across threads therefore produces the same draws as a serial run, which is
// what makes simulation output independent of scheduling.  Outputs follow the
// splitmix64 sequence from the derived state; normals use Box-Muller, so the
// draw count per call is fixed (no rejection).
class CounterRng {
 public:
  static CounterRng for_stream(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t tag = mix64(stream_id * 0xD1342543DE82EF95ull + 0x9E3779B97F4A7C15ull);
    return CounterRng(mix64(seed ^ tag));
  }

  explicit CounterRng(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Uniform on (0, 1]; never returns 0, so log() below is safe.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  void next_normal_pair(double& z0, double& z1) {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    z0 = r * std::cos(t);
    z1 = r * std::sin(t);
  }

  // Fills dst[0..n); a trailing odd slot consumes a full pair.
  void fill_normals(double* dst, long n) {
    long i = 0;
    for (; i + 1 < n; i += 2) next_normal_pair(dst[i], dst[i + 1]);
    if (i < n) {
      double z0, z1;
      next_normal_pair(z0, z1);
      dst[i] = z0;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace lpseq
