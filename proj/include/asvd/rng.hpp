#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace asvd {

/**
 * Deterministic generator keyed by (seed, stream).
 *
 * The engine is std::mt19937_64 (fully specified by the standard) seeded with
 * a splitmix64 hash of the key. Uniform and normal variates are derived here
 * rather than through std::*_distribution, whose algorithms are
 * implementation-defined, so draw sequences are identical across toolchains.
 */
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();
  /// CN(0, variance): real and imaginary parts i.i.d. N(0, variance / 2).
  std::complex<double> complex_normal(double variance = 1.0);
  Eigen::MatrixXcd complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance = 1.0);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace asvd
