#pragma once

// Seeded random streams.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. All variates are produced here from its raw 64-bit output rather
// than through <random> distributions, whose algorithms vary between standard
// libraries.
//
// Stream split rule: replicate i of an experiment seeded with s draws from
// RandomStream(derive_seed(s, i)). derive_seed is a SplitMix64 finaliser over
// s and i, so replicate streams do not depend on how replicates are scheduled.

#include <cstdint>
#include <random>

namespace resnet {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t next() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  // Inverse CDF; never log(0) because uniform() excludes 0.
  double exponential(double rate);
  double normal();
  // Gamma(shape, 1), Marsaglia-Tsang with the shape < 1 boost.
  double gamma(double shape);
  double beta(double a, double b);
  // Number of failures before the first success, P(k) = (1-p)^k p.
  std::uint64_t geometric_failures(double success_probability);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace resnet
