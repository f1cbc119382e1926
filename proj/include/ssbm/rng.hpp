#pragma once

// SplitMix64 stream and the handful of draws the library needs.
//
// Every draw is defined bit-for-bit here (no std:: distributions, whose
// output is implementation-defined) so that another implementation can
// replicate a stream from the seed alone:
//
//   state_0 = seed
//   next():   state += 0x9E3779B97F4A7C15
//             z = state
//             z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//             return z ^ (z >> 31)
//   uniform():        (next() >> 11) * 2^-53            in [0, 1)
//   below(n):         Lemire multiply-shift with rejection
//   exponential():    -log(1 - uniform())
//   flat Dirichlet:   normalized independent exponentials
//   derive(seed, i):  SplitMix64 seeded with seed ^ (i * 0xD1B54A32D192ED03),
//                     first output

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace ssbm {

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return next(); }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  double exponential() { return -std::log1p(-uniform()); }

  // Fills `out` with a draw from the symmetric flat Dirichlet.
  void flat_dirichlet(std::span<double> out) {
    double total = 0.0;
    for (double& x : out) {
      x = exponential();
      total += x;
    }
    if (total <= 0.0) {
      for (double& x : out) x = 1.0 / static_cast<double>(out.size());
      return;
    }
    for (double& x : out) x /= total;
  }

  // Index of the category drawn from a probability vector.
  std::size_t categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t h = 0; h < probs.size(); ++h) {
      acc += probs[h];
      if (u < acc) return h;
    }
    // Rounding left u above the cumulative sum; take the last nonzero one.
    for (std::size_t h = probs.size(); h-- > 0;) {
      if (probs[h] > 0.0) return h;
    }
    return probs.size() - 1;
  }

 private:
  std::uint64_t state_;
};

// Independent per-task seed derived from a base seed and a task index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (index * 0xD1B54A32D192ED03ULL));
  return g.next();
}

}  // namespace ssbm
