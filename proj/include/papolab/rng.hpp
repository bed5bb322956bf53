#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace papolab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic seed derivation for independent substreams (per step, per
// group, per trajectory). Chaining splitmix64 keeps the streams decorrelated
// without any shared mutable state.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t p : path) {
    s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  }
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits; platform-independent given the
  // engine's output sequence.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
  }

  // Inverse-CDF draw from an explicit probability vector.
  std::size_t sample_discrete(const std::vector<double>& probs) {
    const double u = uniform01();
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t v = 0; v < probs.size(); ++v) {
      if (probs[v] > 0.0) last_positive = v;
      cum += probs[v];
      if (u < cum) return v;
    }
    return last_positive;  // u fell past the (rounded) total mass
  }

  // Symmetric Dirichlet(alpha) sample; used by the fuzz suites.
  std::vector<double> dirichlet(std::size_t n, double alpha) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> x(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double g = gamma(engine_);
      // Guard against underflow at small alpha; keeps probs strictly positive.
      if (g < 1e-300) g = 1e-300;
      x[i] = g;
      sum += g;
    }
    for (double& xi : x) xi /= sum;
    return x;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace papolab
