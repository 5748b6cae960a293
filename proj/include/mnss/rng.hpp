#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "mnss/quantile.hpp"

namespace mnss {

// Stateless splitmix64 scramble; used to spread seed material.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derives an independent substream seed from a base seed and a list of
// stream coordinates (scenario index, n index, replicate index, ...).
// Every distinct coordinate tuple maps to a well-separated seed, which is
// what makes parallel runs independent of worker count.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> coords) {
  std::uint64_t s = splitmix64(base ^ 0x6A09E667F3BCC909ULL);
  for (std::uint64_t c : coords) {
    s = splitmix64(s ^ splitmix64(c + 0x9E3779B97F4A7C15ULL));
  }
  return s;
}

// Deterministic random stream: mt19937_64 with inverse-CDF normal draws so
// that the sequence depends only on the seed, not on library internals.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0,1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_quantile(uniform()); }

  Eigen::VectorXd normals(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Eigen::VectorXd uniforms(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform();
    return v;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mnss
