#include <cmath>

#include <gtest/gtest.h>

#include "asvd/perturb.hpp"
#include "asvd/sysid.hpp"

namespace asvd {
namespace {

WienerEstimate perfect_estimate(const PolyMatrix& A) {
  WienerEstimate est;
  const int delay = causal_delay(A);
  est.A_hat = shift(A, delay);
  est.J_hat = static_cast<std::size_t>(est.A_hat.n_max());
  est.delay = delay;
  return est;
}

TEST(Simulate, IdentityNoiseless) {
  SeededRng rng(1);
  const SignalFrame f = simulate(PolyMatrix::identity(2), 100, 0.0, rng);
  EXPECT_EQ(f.x.cols(), 100);
  EXPECT_EQ(f.y, f.x);
}

TEST(Simulate, UnitDelay) {
  SeededRng rng(2);
  const SignalFrame f = simulate(PolyMatrix::monomial(ComplexMatrix::Identity(2, 2), 1), 50, 0.0, rng);
  EXPECT_EQ(f.y.col(0), Eigen::VectorXcd::Zero(2));
  for (Eigen::Index n = 1; n < 50; ++n) EXPECT_EQ(f.y.col(n), f.x.col(n - 1));
}

TEST(Simulate, ExampleOneMatchesDirectConvolution) {
  const GroundTruthSystem sys = example1();
  SeededRng rng(3);
  const SignalFrame f = simulate(sys, 40, 0.0, rng);
  EXPECT_EQ(f.delay, 1);
  for (Eigen::Index n = 0; n < 40; ++n) {
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(2);
    for (int p = -1; p <= 1; ++p) {
      const Eigen::Index src = n - (p + 1);
      if (src >= 0) y += sys.A.coeff(p) * f.x.col(src);
    }
    EXPECT_LE((f.y.col(n) - y).norm(), 1e-14);
  }
}

TEST(Simulate, InputVariance) {
  SeededRng rng(4);
  const SignalFrame f = simulate(PolyMatrix::identity(3), 100000, 0.0, rng);
  for (Eigen::Index l = 0; l < 3; ++l) EXPECT_NEAR(f.x.row(l).squaredNorm() / 100000.0, 1.0, 0.02);
}

TEST(Wiener, NoiselessExactOrder) {
  const GroundTruthSystem sys = example1();
  SeededRng rng(5);
  const SignalFrame f = simulate(sys, 100000, 0.0, rng);
  const WienerEstimate est = wiener_estimate(f, 2, 0.0);
  EXPECT_LE(frob_energy(error_system(est, sys)), 1e-6 * frob_energy(sys.A));
}

TEST(Wiener, ConstantSystemZeroOrder) {
  SeededRng rng(6);
  const ComplexMatrix a = rng.complex_gaussian(2, 3);
  const SignalFrame f = simulate(PolyMatrix::monomial(a), 2000, 0.0, rng);
  const WienerEstimate est = wiener_estimate(f, 0);
  EXPECT_LE((est.A_hat.coeff(0) - a).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Wiener, SingularInputThrows) {
  SignalFrame f;
  f.N = 50;
  f.x = ComplexMatrix::Zero(2, 50);
  f.y = ComplexMatrix::Zero(2, 50);
  EXPECT_THROW(wiener_estimate(f, 1, 0.0), std::domain_error);
}

TEST(ErrorSystem, TruthGivesZero) {
  const GroundTruthSystem sys = example1();
  const PolyMatrix e = error_system(perfect_estimate(sys.A), sys);
  EXPECT_EQ(max_abs_coeff(e), 0.0);
  SeededRng rng(7);
  WienerEstimate est = perfect_estimate(sys.A);
  const PolyMatrix d = random_error(2, 2, 2, 0.1, rng);
  est.A_hat = add(est.A_hat, d);
  EXPECT_NEAR(frob_energy(error_system(est, sys)), frob_energy(d), 1e-14);
  EXPECT_GT(normalized_variance(error_system(est, sys), sys.A), 0.0);
}

TEST(MseDecomposition, PerfectEstimateNoiseless) {
  const GroundTruthSystem sys = example1();
  SeededRng rng(8);
  const SignalFrame f = simulate(sys, 1000, 0.0, rng);
  const MseReport r = mse_decomposition(f, perfect_estimate(sys.A), sys);
  EXPECT_LE(r.xi_mse, 1e-28);
  EXPECT_EQ(r.error_energy, 0.0);
  EXPECT_EQ(r.noise_floor, 0.0);
  EXPECT_LE(r.decomposition_gap, 1e-28);
}

TEST(MseDecomposition, PerfectEstimateNoiseFloor) {
  const GroundTruthSystem sys = example1();
  SeededRng rng(9);
  const SignalFrame f = simulate(sys, 100000, 0.02, rng);
  const MseReport r = mse_decomposition(f, perfect_estimate(sys.A), sys);
  EXPECT_NEAR(r.xi_mse / 0.04, 1.0, 0.05);
}

TEST(MseDecomposition, GapSmallAtLargeN) {
  const GroundTruthSystem sys = example1();
  SeededRng rng(10);
  const SignalFrame f = simulate(sys, 100000, 0.01, rng);
  const WienerEstimate est = wiener_estimate(f, 2);
  const MseReport r = mse_decomposition(f, est, sys);
  EXPECT_LE(r.decomposition_gap / r.xi_mse, 0.1);
  EXPECT_NEAR(r.xi_mse / (r.noise_floor + r.error_energy), 1.0, 0.1);
}

TEST(SysidProperty, ResidualOrthogonalToRegressors) {
  const GroundTruthSystem sys = example1();
  SeededRng rng(11);
  const SignalFrame f = simulate(sys, 20000, 0.01, rng);
  const WienerEstimate est = wiener_estimate(f, 3, 0.0);
  EXPECT_LE(residual_cross_correlation(f, est).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SysidProperty, EstimateBeatsTruthOnSampleMse) {
  const GroundTruthSystem sys = example1();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SeededRng rng(seed);
    const SignalFrame f = simulate(sys, 5000, 0.05, rng);
    const WienerEstimate est = wiener_estimate(f, 2, 0.0);
    EXPECT_LE(sample_mse(f, est.A_hat, 2), sample_mse(f, shift(sys.A, f.delay), 2));
  }
}

TEST(SysidProperty, ErrorEnergyDecreasesWithN) {
  const GroundTruthSystem sys = example1();
  double previous = INFINITY;
  for (std::size_t N : {1000u, 10000u, 100000u}) {
    std::vector<double> energies;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SeededRng rng(seed, N);
      const SignalFrame f = simulate(sys, N, 0.01, rng);
      energies.push_back(frob_energy(error_system(wiener_estimate(f, 2), sys)));
    }
    std::nth_element(energies.begin(), energies.begin() + 2, energies.end());
    EXPECT_LT(energies[2], previous) << N;
    previous = energies[2];
  }
}

TEST(Sysid, JsonReport) {
  MseReport r;
  r.N = 10;
  r.xi_mse = 0.5;
  const nlohmann::json j = to_json(r);
  EXPECT_EQ(j["N"], 10);
  EXPECT_EQ(j["xi_mse"], 0.5);
}

}  // namespace
}  // namespace asvd
