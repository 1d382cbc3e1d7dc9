#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "asvd/perturb.hpp"

namespace asvd {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> rician_samples(double nu, double s, std::size_t n, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = std::hypot(nu + s * rng.normal(), s * rng.normal());
  return out;
}

TEST(RandomError, ZeroVariance) {
  SeededRng rng(1);
  EXPECT_TRUE(random_error(2, 3, 4, 0.0, rng).is_zero());
}

TEST(RandomError, ExpectedEnergy) {
  SeededRng rng(2);
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += frob_energy(random_error(2, 2, 2, 1e-4, rng));
  EXPECT_NEAR(sum / n / 1.2e-3, 1.0, 0.05);
}

TEST(RandomError, Reproducible) {
  SeededRng a(3, 5);
  SeededRng b(3, 5);
  const PolyMatrix x = random_error(3, 3, 4, 0.5, a, -2);
  const PolyMatrix y = random_error(3, 3, 4, 0.5, b, -2);
  EXPECT_EQ(x.n_min(), -2);
  EXPECT_EQ(x.num_taps(), 5u);
  for (std::size_t t = 0; t < x.num_taps(); ++t) EXPECT_EQ(x.tap(t), y.tap(t));
}

TEST(NormalizedVariance, Basics) {
  const PolyMatrix a = example1().A;
  EXPECT_DOUBLE_EQ(normalized_variance(a, a), 1.0);
  EXPECT_EQ(normalized_variance(PolyMatrix::zero(2, 2), a), 0.0);
  SeededRng rng(4);
  const PolyMatrix e = random_error(2, 2, 2, 1.0, rng, -1);
  EXPECT_NEAR(normalized_variance(scale(e, Complex(0, 3.0)), a) / normalized_variance(e, a), 9.0, 1e-12);
  EXPECT_THROW(normalized_variance(a, PolyMatrix::zero(2, 2)), std::invalid_argument);
}

TEST(ScaleToNormalized, Targets) {
  const PolyMatrix a = example1().A;
  SeededRng rng(5);
  const PolyMatrix e = random_error(2, 2, 2, 1.0, rng, -1);
  const PolyMatrix same = scale_to_normalized(e, a, normalized_variance(e, a));
  for (std::size_t t = 0; t < e.num_taps(); ++t) EXPECT_LE((same.tap(t) - e.tap(t)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(scale_to_normalized(e, a, 0.0).is_zero());
  EXPECT_NEAR(normalized_variance(scale_to_normalized(e, a, 0.3), a), 0.3, 1e-12);
}

TEST(PerturbAndAnalyze, ProbabilityOneSmallLevel) {
  SeededRng rng(6);
  const GroundTruthSystem sys = bigsys(rng);
  PerturbConfig cfg;
  cfg.sigma2_norm = 1e-4;
  cfg.trials = 10;
  cfg.K = 1024;
  cfg.seed = 6;
  const PerturbRun run = perturb_and_analyze(sys, cfg);
  ASSERT_EQ(run.trials.size(), 10u);
  for (const auto& t : run.trials) {
    EXPECT_GT(*t.diag.min_gap, 0.0);
    EXPECT_GT(t.diag.min_smallest, 0.0);
    EXPECT_NEAR(t.sigma2_norm_actual, 1e-4, 1e-15);
  }
}

TEST(PerturbAndAnalyze, ZeroErrorMatchesGroundTruth) {
  const GroundTruthSystem sys = example1();
  PerturbConfig cfg;
  cfg.sigma2_e = 0.0;
  cfg.K = 256;
  const PerturbRun run = perturb_and_analyze(sys, cfg);
  const DiagnosticsReport truth = diagnostics(majorized_trajectories(binwise_svd(sys.A, 256)));
  const DiagnosticsReport got = run.trials[0].diag;
  EXPECT_EQ(*got.min_gap, *truth.min_gap);
  EXPECT_EQ(got.min_smallest, truth.min_smallest);
  EXPECT_EQ(got.omega_smallest, truth.omega_smallest);
  EXPECT_LE(run.trials[0].sup_deviation.maxCoeff(), 1e-12);
}

TEST(PerturbAndAnalyze, ExampleOneZeroCrossingLifted) {
  PerturbConfig cfg;
  cfg.sigma2_e = 1e-4;
  cfg.K = 4096;
  cfg.trials = 5;
  cfg.seed = 7;
  for (const auto& t : perturb_and_analyze(example1(), cfg).trials) EXPECT_GT(t.diag.min_smallest, 0.0);
}

TEST(PerturbAndAnalyze, DeterministicAcrossThreads) {
  SeededRng rng(8);
  const GroundTruthSystem sys = bigsys(rng);
  PerturbConfig cfg;
  cfg.sigma2_norm = 1e-2;
  cfg.trials = 4;
  cfg.K = 128;
  cfg.threads = 1;
  const PerturbRun a = perturb_and_analyze(sys, cfg);
  cfg.threads = 4;
  const PerturbRun b = perturb_and_analyze(sys, cfg);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(*a.trials[t].diag.min_gap, *b.trials[t].diag.min_gap);
    EXPECT_EQ(a.trials[t].sup_deviation, b.trials[t].sup_deviation);
  }
  EXPECT_EQ(a.last_trajectories.values, b.last_trajectories.values);
}

TEST(PerturbConfig, Validation) {
  PerturbConfig cfg;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.sigma2_e = 1.0;
  cfg.sigma2_norm = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.sigma2_norm.reset();
  EXPECT_NO_THROW(cfg.validate());
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Histogram, SmallestValueExcludesZero) {
  SeededRng rng(9);
  const auto samples = bin_histogram_trials(example1(), kPi, 10000, 1e-4, rng);
  ASSERT_EQ(samples.size(), 2u);
  ASSERT_EQ(samples[1].size(), 10000u);
  EXPECT_GT(*std::min_element(samples[1].begin(), samples[1].end()), 0.0);
}

TEST(Histogram, NoiselessSamplesAreExact) {
  SeededRng rng(10);
  const double w = 1.0;
  const auto samples = bin_histogram_trials(example1(), w, 20, 0.0, rng);
  const double hi = std::max(1.0 + 0.5 * std::cos(w), std::abs(2.0 * std::sin(w)));
  const double lo = std::min(1.0 + 0.5 * std::cos(w), std::abs(2.0 * std::sin(w)));
  for (double x : samples[0]) EXPECT_NEAR(x, hi, 1e-14);
  for (double x : samples[1]) EXPECT_NEAR(x, lo, 1e-14);
}

TEST(Histogram, ZeroScalarGivesRayleigh) {
  GroundTruthSystem sys;
  sys.A = PolyMatrix::zero(1, 1);
  SeededRng a(11);
  SeededRng b(11);
  const auto samples = bin_histogram_trials(sys, 0.3, 5000, 1.0, a);
  for (std::size_t t = 0; t < 5000; ++t) {
    const Complex e = b.complex_normal(1.0);
    EXPECT_NEAR(samples[0][t], std::abs(e), 1e-14);
  }
  // Rayleigh with s^2 = 1/2: mean sqrt(pi)/2
  double mean = 0.0;
  for (double x : samples[0]) mean += x;
  EXPECT_NEAR(mean / 5000, std::sqrt(kPi) / 2.0, 0.02);
}

TEST(Rician, MomentFormulas) {
  // Rayleigh limit
  EXPECT_NEAR(rician_mean(0.0, 1.0), std::sqrt(kPi / 2.0), 1e-14);
  EXPECT_NEAR(rician_variance(0.0, 1.0), (4.0 - kPi) / 2.0, 1e-14);
  // E[x^2] = nu^2 + 2 s^2 for any parameters
  for (double nu : {0.3, 2.0, 7.0, 100.0}) {
    const double m = rician_mean(nu, 0.7);
    EXPECT_NEAR(rician_variance(nu, 0.7) + m * m, nu * nu + 2 * 0.49, 1e-9 * (nu * nu + 1));
  }
  // high-SNR limit: mean -> nu
  EXPECT_NEAR(rician_mean(1000.0, 1.0), 1000.0 + 0.5 / 1000.0, 1e-6);
}

TEST(Rician, RecoversRayleigh) {
  const RicianFit f = rician_fit(rician_samples(0.0, 1.0, 100000, 12));
  EXPECT_LE(f.nu, 0.05);
  EXPECT_NEAR(f.s, 1.0, 0.02);
}

TEST(Rician, RecoversRician) {
  const RicianFit f = rician_fit(rician_samples(3.0, 0.5, 100000, 13));
  EXPECT_NEAR(f.nu / 3.0, 1.0, 0.02);
  EXPECT_NEAR(f.s / 0.5, 1.0, 0.02);
  EXPECT_LT(f.residual, 1e-6);
  EXPECT_FALSE(f.rayleigh);
}

TEST(Rician, RejectsDegenerateInput) {
  EXPECT_THROW(rician_fit(std::vector<double>(200, 1.0)), std::invalid_argument);
  EXPECT_THROW(rician_fit(std::vector<double>(50, 1.0)), std::invalid_argument);
  std::vector<double> neg = rician_samples(1.0, 1.0, 200, 14);
  neg[3] = -1.0;
  EXPECT_THROW(rician_fit(neg), std::invalid_argument);
}

TEST(Stewart, ZeroError) {
  SeededRng rng(15);
  const ComplexMatrix a = rng.complex_gaussian(3, 3);
  for (Eigen::Index m = 0; m < 3; ++m) {
    const StewartCheck c = stewart_bounds(a, ComplexMatrix::Zero(3, 3), m);
    EXPECT_NEAR(c.varsigma, c.sigma_true, 1e-14);
    EXPECT_NEAR(c.upper, c.sigma_true, 1e-14);
    EXPECT_TRUE(c.holds);
  }
}

TEST(Stewart, ScalarZeroSystem) {
  ComplexMatrix e(1, 1);
  e << Complex(0.3, -0.4);
  const StewartCheck c = stewart_bounds(ComplexMatrix::Zero(1, 1), e, 0);
  EXPECT_NEAR(c.varsigma, 0.5, 1e-15);
  EXPECT_NEAR(c.upper, 0.5, 1e-15);
  EXPECT_NEAR(c.lower, 0.5, 1e-15);
  EXPECT_TRUE(c.holds);
}

TEST(StewartProperty, RankDeficientExampleBin) {
  const ComplexMatrix a = eval(example1().A, kPi);
  SeededRng rng(16);
  for (int i = 0; i < 100; ++i) {
    const ComplexMatrix e = rng.complex_gaussian(2, 2, 1e-2);
    for (Eigen::Index m = 0; m < 2; ++m) {
      const StewartCheck c = stewart_bounds(a, e, m);
      EXPECT_TRUE(c.holds) << i << " " << m;
      EXPECT_NEAR(c.varsigma, svd(a + e).sigma(m), 1e-15);
    }
  }
}

TEST(StewartProperty, RandomBigsysBins) {
  SeededRng rng(17);
  const GroundTruthSystem sys = bigsys(rng);
  for (int i = 0; i < 10; ++i) {
    const ComplexMatrix a = eval(sys.A, 2 * kPi * rng.uniform());
    const ComplexMatrix e = rng.complex_gaussian(6, 6, 0.1);
    for (Eigen::Index m = 0; m < 6; ++m) EXPECT_TRUE(stewart_bounds(a, e, m).holds);
  }
}

TEST(Json, TrialAndFit) {
  TrialReport r;
  r.trial = 3;
  r.diag.min_smallest = 0.25;
  const nlohmann::json j = to_json(r);
  EXPECT_EQ(j["trial"], 3);
  EXPECT_TRUE(j["min_gap"].is_null());
  EXPECT_EQ(j["min_smallest"], 0.25);
  RicianFit f;
  f.nu = 1.0;
  EXPECT_EQ(to_json(f, 2)["index"], 2);
}

}  // namespace
}  // namespace asvd
