#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "asvd/anasvd.hpp"
#include "asvd/densela.hpp"
#include "asvd/polymat.hpp"
#include "asvd/rng.hpp"
#include "asvd/sysgen.hpp"

namespace asvd {

struct PerturbConfig {
  std::optional<double> sigma2_e;     // per-coefficient variance
  std::optional<double> sigma2_norm;  // target normalised error energy
  std::optional<std::size_t> error_order;  // defaults to the order of A
  std::size_t trials = 1;
  std::size_t K = 4096;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  /// Exactly one of sigma2_e / sigma2_norm, non-negative; trials >= 1; K >= 1.
  void validate() const;
};

/// Trial t draws from SeededRng(seed, trial_stream(t)); stream 0 is left to
/// system generation.
constexpr std::uint64_t trial_stream(std::size_t trial) { return static_cast<std::uint64_t>(trial) + 1; }

/// (order + 1) taps starting at z^{-n_min}, i.i.d. CN(0, sigma2_e).
PolyMatrix random_error(Eigen::Index rows, Eigen::Index cols, std::size_t order, double sigma2_e, SeededRng& rng,
                        int n_min = 0);

/// sum_n |E[n]|_F^2 / sum_n |A[n]|_F^2.
double normalized_variance(const PolyMatrix& E, const PolyMatrix& A);

/// c E such that normalized_variance(c E, A) == target.
PolyMatrix scale_to_normalized(const PolyMatrix& E, const PolyMatrix& A, double target);

struct TrialReport {
  std::size_t trial = 0;
  DiagnosticsReport diag;
  double sigma2_norm_actual = 0.0;
  /// Per track: max over bins of |perturbed - majorized ground truth|.
  /// Empty when the system carries no generator sigmas.
  Eigen::VectorXd sup_deviation;
};

struct PerturbRun {
  std::vector<TrialReport> trials;
  SvTrajectories last_trajectories;  // majorized, last trial
  PolyMatrix last_perturbed;
};

/// A + E per trial, bin-wise SVD, majorized tracks and diagnostics.
PerturbRun perturb_and_analyze(const GroundTruthSystem& sys, const PerturbConfig& cfg);

/// Majorized singular values of A(e^{j omega0}) + E(e^{j omega0}) per trial;
/// returns one sample vector per singular-value index.
std::vector<std::vector<double>> bin_histogram_trials(const GroundTruthSystem& sys, double omega0,
                                                      std::size_t trials, double sigma2_e, SeededRng& rng);

struct RicianFit {
  double nu = 0.0;
  double s = 0.0;
  std::size_t n_samples = 0;
  /// max(|mean_model - mean_sample|, |var_model - var_sample|)
  double residual = 0.0;
  /// Sample dispersion at or beyond the Rayleigh limit; nu clamped to 0.
  bool rayleigh = false;
};

double rician_mean(double nu, double s);
double rician_variance(double nu, double s);

/// Method-of-moments fit (mean and variance) by bisection on nu / s.
/// Needs >= 100 non-negative samples with non-zero variance.
RicianFit rician_fit(std::span<const double> samples);

struct StewartCheck {
  double sigma_true = 0.0;
  double varsigma = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  bool holds = false;
};

/// Bounds on the m-th (0-based) singular value of A_bin + E_bin around the
/// m-th singular value of A_bin.
StewartCheck stewart_bounds(const ComplexMatrix& A_bin, const ComplexMatrix& E_bin, Eigen::Index m,
                            double rank_tol = kRankTol, double tol = 1e-9);

nlohmann::json to_json(const TrialReport& r);
nlohmann::json to_json(const RicianFit& f, std::size_t index);

}  // namespace asvd
