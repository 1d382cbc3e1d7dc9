#pragma once

#include <cstddef>
#include <optional>

#include "asvd/polymat.hpp"
#include "asvd/rng.hpp"
#include "asvd/sysgen.hpp"

namespace asvd {

/// Input/output record of y[n] = A[n] * x[n] + v[n], n = 0..N-1.
struct SignalFrame {
  ComplexMatrix x;  // L x N
  ComplexMatrix y;  // M x N
  double sigma2_v = 0.0;
  std::size_t N = 0;
  /// Extra delay z^{-delay} applied to A so that the simulated system is causal.
  int delay = 0;
};

/// Delay that makes `a` causal: max(0, -n_min).
int causal_delay(const PolyMatrix& a);

/// x ~ CN(0, 1) and v ~ CN(0, sigma2_v), both white; zero initial state.
/// Draws all of x first, then all of v.
SignalFrame simulate(const PolyMatrix& A, std::size_t N, double sigma2_v, SeededRng& rng);
SignalFrame simulate(const GroundTruthSystem& sys, std::size_t N, double sigma2_v, SeededRng& rng);

/// Causal FIR estimate in the delayed domain: taps 0..J_hat.
struct WienerEstimate {
  PolyMatrix A_hat;
  std::size_t J_hat = 0;
  double regularization = 0.0;
  int delay = 0;
};

/// Sample normal equations over stacked regressors [x[n]; ...; x[n - J_hat]],
/// n = J_hat..N-1. reg defaults to 1e-10 tr(R_xx) / ((J_hat + 1) L); pass 0
/// for the plain least-squares solution. Throws std::domain_error when the
/// normal equations are singular.
WienerEstimate wiener_estimate(const SignalFrame& frame, std::size_t J_hat, std::optional<double> reg = std::nullopt);

/// E[n] = A_hat[n] - A[n] with the simulation delay removed.
PolyMatrix error_system(const WienerEstimate& est, const GroundTruthSystem& sys);
PolyMatrix error_system(const WienerEstimate& est, const PolyMatrix& A);

/// Sample mean over n = J..N-1 of |B * x[n] - y[n]|^2 for a causal B with
/// taps 0..J (in the delayed domain).
double sample_mse(const SignalFrame& frame, const PolyMatrix& B, std::size_t J);

/// (1 / N_eff) sum_n r[n] X_n^H: residual / regressor cross-correlation.
ComplexMatrix residual_cross_correlation(const SignalFrame& frame, const WienerEstimate& est);

struct MseReport {
  std::size_t N = 0;
  std::size_t J_hat = 0;
  double sigma2_v = 0.0;
  double xi_mse = 0.0;
  double error_energy = 0.0;
  double noise_floor = 0.0;
  double decomposition_gap = 0.0;
  double sigma2_norm = 0.0;
};

MseReport mse_decomposition(const SignalFrame& frame, const WienerEstimate& est, const GroundTruthSystem& sys);

nlohmann::json to_json(const MseReport& r);

}  // namespace asvd
