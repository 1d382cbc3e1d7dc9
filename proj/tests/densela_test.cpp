#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "asvd/densela.hpp"
#include "asvd/rng.hpp"
#include "asvd/sysgen.hpp"

namespace asvd {
namespace {

constexpr double kPi = std::numbers::pi;

void expect_valid_svd(const ComplexMatrix& a, const SvdResult& s, double tol) {
  const Eigen::Index r = std::min(a.rows(), a.cols());
  ASSERT_EQ(s.sigma.size(), r);
  ASSERT_EQ(s.U.rows(), a.rows());
  ASSERT_EQ(s.U.cols(), a.rows());
  ASSERT_EQ(s.V.rows(), a.cols());
  ASSERT_EQ(s.V.cols(), a.cols());
  ComplexMatrix sig = ComplexMatrix::Zero(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < r; ++i) sig(i, i) = s.sigma(i);
  EXPECT_LE((s.U * sig * s.V.adjoint() - a).norm(), tol * std::max(1.0, a.norm()));
  EXPECT_LE((s.U.adjoint() * s.U - ComplexMatrix::Identity(a.rows(), a.rows())).norm(), tol);
  EXPECT_LE((s.V.adjoint() * s.V - ComplexMatrix::Identity(a.cols(), a.cols())).norm(), tol);
  for (Eigen::Index i = 0; i < r; ++i) {
    EXPECT_GE(s.sigma(i), 0.0);
    if (i + 1 < r) EXPECT_GE(s.sigma(i), s.sigma(i + 1));
  }
}

TEST(Svd, SignsAbsorbed) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = -3.0;
  const SvdResult s = svd(a);
  EXPECT_NEAR(s.sigma(0), 3.0, 1e-15);
  EXPECT_NEAR(s.sigma(1), 2.0, 1e-15);
  expect_valid_svd(a, s, 1e-14);
}

TEST(Svd, ExampleOneBins) {
  const PolyMatrix a = example1().A;
  const SvdResult s0 = svd(eval(a, 0.0));
  EXPECT_NEAR(s0.sigma(0), 1.5, 1e-14);
  EXPECT_NEAR(s0.sigma(1), 0.0, 1e-14);
  const SvdResult s1 = svd(eval(a, kPi / 2));
  EXPECT_NEAR(s1.sigma(0), 2.0, 1e-14);
  EXPECT_NEAR(s1.sigma(1), 1.0, 1e-14);
}

TEST(Svd, RejectsNonFinite) {
  ComplexMatrix a = ComplexMatrix::Identity(2, 2);
  a(1, 0) = std::nan("");
  EXPECT_THROW(svd(a), std::domain_error);
  a(1, 0) = INFINITY;
  EXPECT_THROW(svd(a), std::domain_error);
}

TEST(Svd, Norms) {
  EXPECT_NEAR(spectral_norm(ComplexMatrix::Identity(3, 3)), 1.0, 1e-15);
  EXPECT_NEAR(smallest_sv(ComplexMatrix::Identity(3, 3)), 1.0, 1e-15);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  EXPECT_NEAR(spectral_norm(d), 1.0, 1e-15);
  EXPECT_NEAR(smallest_sv(d), 0.0, 1e-15);

  SeededRng rng(4);
  const ComplexMatrix r = rng.complex_gaussian(4, 4);
  const SvdResult s = svd(r);
  EXPECT_NEAR(spectral_norm(r), s.sigma(0), 1e-14);
  EXPECT_NEAR(smallest_sv(r), s.sigma(3), 1e-14);
  // power iteration on A^H A as an independent check of the largest value
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(4);
  for (int i = 0; i < 500; ++i) x = (r.adjoint() * r * x).normalized();
  EXPECT_NEAR(spectral_norm(r), (r * x).norm(), 1e-10);
}

TEST(Projector, FullRank) {
  SeededRng rng(6);
  const Projectors p = colspace_projector(rng.complex_gaussian(3, 3));
  EXPECT_EQ(p.rank, 3);
  EXPECT_LE((p.P - ComplexMatrix::Identity(3, 3)).norm(), 1e-12);
  EXPECT_LE(p.P_perp.norm(), 1e-12);
}

TEST(Projector, Column) {
  ComplexMatrix a(2, 1);
  a << 1.0, 0.0;
  const Projectors p = colspace_projector(a);
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  EXPECT_EQ(p.rank, 1);
  EXPECT_LE((p.P - expected).norm(), 1e-15);
}

TEST(Projector, RankDeficientExampleBin) {
  const Projectors p = colspace_projector(eval(example1().A, kPi));
  EXPECT_EQ(p.rank, 1);
  EXPECT_NEAR(p.P.trace().real(), 1.0, 1e-12);
  EXPECT_LE((p.P * p.P - p.P).norm(), 1e-12);
  EXPECT_LE((p.P + p.P_perp - ComplexMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(SvdProperty, RandomMatrices) {
  SeededRng rng(100);
  for (int i = 0; i < 100; ++i) {
    const auto rows = static_cast<Eigen::Index>(1 + rng.uniform() * 8);
    const auto cols = static_cast<Eigen::Index>(1 + rng.uniform() * 8);
    const ComplexMatrix a = rng.complex_gaussian(rows, cols);
    expect_valid_svd(a, svd(a), 1e-12);
  }
}

TEST(SvdProperty, AdjointAndPhaseInvariance) {
  SeededRng rng(101);
  for (int i = 0; i < 50; ++i) {
    const ComplexMatrix a = rng.complex_gaussian(1 + i % 6, 1 + (i / 6) % 8);
    const Eigen::VectorXd s = svd(a).sigma;
    EXPECT_LE((svd(a.adjoint()).sigma - s).cwiseAbs().maxCoeff(), 1e-12);
    const Complex phase = std::polar(1.0, 2.0 * kPi * rng.uniform());
    EXPECT_LE((svd(phase * a).sigma - s).cwiseAbs().maxCoeff(), 1e-12);
  }
}

}  // namespace
}  // namespace asvd
