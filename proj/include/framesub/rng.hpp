#ifndef FRAMESUB_RNG_HPP
#define FRAMESUB_RNG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "framesub/errors.hpp"

namespace framesub {

// Deterministic RNG front end. mt19937_64 output is fixed by the standard and
// all derived quantities below avoid std::*_distribution, whose streams are
// implementation defined. This keeps seeded runs byte-identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Modulo bias is ~n/2^64, irrelevant here.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw_invalid_input("uniform_index: empty range");
    return next_u64() % n;
  }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Standard normal via Box-Muller on our own uniforms.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(angle);
    have_cached_ = true;
    return r * std::cos(angle);
  }

  // Independent child stream; splitmix64 decorrelates nearby stream ids.
  Rng fork(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 0x9e3779b97f4a7c15ull))); }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

inline std::vector<Eigen::Index> random_permutation(Eigen::Index n, Rng& rng) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

// Inverse-CDF sampler for a fixed nonnegative weight vector.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const Eigen::VectorXd& weights) {
    if (weights.size() == 0) throw_invalid_input("DiscreteSampler: empty weights");
    cdf_.resize(static_cast<std::size_t>(weights.size()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      const double w = weights[i];
      if (!(w >= 0.0)) throw_invalid_input("DiscreteSampler: negative or NaN weight");
      acc += w;
      cdf_[static_cast<std::size_t>(i)] = acc;
    }
    if (acc <= 0.0) throw_invalid_input("DiscreteSampler: all weights zero");
    total_ = acc;
  }

  Eigen::Index sample(Rng& rng) const {
    const double u = rng.uniform() * total_;
    // First index with cdf > u; this never lands on a zero-weight plateau.
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    auto idx = static_cast<Eigen::Index>(it - cdf_.begin());
    if (idx >= static_cast<Eigen::Index>(cdf_.size())) idx = static_cast<Eigen::Index>(cdf_.size()) - 1;
    return idx;
  }

 private:
  std::vector<double> cdf_;
  double total_ = 0.0;
};

}  // namespace framesub

#endif  // FRAMESUB_RNG_HPP
