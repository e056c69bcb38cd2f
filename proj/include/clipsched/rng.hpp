// Self-contained deterministic RNG (splitmix64 core) with explicit sampling
// algorithms. std:: distributions are implementation-defined, which would
// break the byte-identical-output guarantee across toolchains.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace clipsched {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  std::int64_t range_i64(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Standard normal via Box-Muller (one deviate per call; cached pair dropped
  // on purpose so the stream is a pure function of call count).
  double normal() {
    double u1 = uniform(), u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double lognormal(double mu_log, double sigma_log) {
    return std::exp(mu_log + sigma_log * normal());
  }

  // Index sampled proportionally to non-negative weights.
  std::size_t weighted(const std::vector<double>& w, double total) {
    double x = uniform() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      x -= w[i];
      if (x < 0) return i;
    }
    return w.empty() ? 0 : w.size() - 1;
  }

 private:
  std::uint64_t state_;
};

// Derives independent child seeds from a master seed (stable mixing).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  return r.next_u64();
}

}  // namespace clipsched
