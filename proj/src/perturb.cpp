#include "asvd/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "asvd/parallel.hpp"

namespace asvd {

void PerturbConfig::validate() const {
  if (sigma2_e.has_value() == sigma2_norm.has_value()) {
    throw std::invalid_argument("PerturbConfig: set exactly one of sigma2_e and sigma2_norm");
  }
  if (sigma2_e && !(*sigma2_e >= 0.0)) throw std::invalid_argument("PerturbConfig: sigma2_e must be >= 0");
  if (sigma2_norm && !(*sigma2_norm >= 0.0)) throw std::invalid_argument("PerturbConfig: sigma2_norm must be >= 0");
  if (trials < 1) throw std::invalid_argument("PerturbConfig: trials must be >= 1");
  if (K < 1) throw std::invalid_argument("PerturbConfig: K must be >= 1");
}

PolyMatrix random_error(Eigen::Index rows, Eigen::Index cols, std::size_t order, double sigma2_e, SeededRng& rng,
                        int n_min) {
  if (!(sigma2_e >= 0.0)) throw std::invalid_argument("random_error: sigma2_e must be >= 0");
  if (sigma2_e == 0.0) return PolyMatrix::zero(rows, cols);
  std::vector<ComplexMatrix> taps;
  taps.reserve(order + 1);
  for (std::size_t t = 0; t <= order; ++t) taps.push_back(rng.complex_gaussian(rows, cols, sigma2_e));
  return PolyMatrix(rows, cols, n_min, std::move(taps));
}

double normalized_variance(const PolyMatrix& E, const PolyMatrix& A) {
  const double ea = frob_energy(A);
  if (!(ea > 0.0)) throw std::invalid_argument("normalized_variance: A has zero energy");
  return frob_energy(E) / ea;
}

PolyMatrix scale_to_normalized(const PolyMatrix& E, const PolyMatrix& A, double target) {
  if (!(target >= 0.0)) throw std::invalid_argument("scale_to_normalized: target must be >= 0");
  const double ee = frob_energy(E);
  if (!(ee > 0.0)) throw std::invalid_argument("scale_to_normalized: E has zero energy");
  if (target == 0.0) return PolyMatrix::zero(E.rows(), E.cols());
  const double c = std::sqrt(target * frob_energy(A) / ee);
  std::vector<ComplexMatrix> taps;
  taps.reserve(E.num_taps());
  for (const auto& t : E.taps()) taps.push_back(c * t);
  return PolyMatrix(E.rows(), E.cols(), E.n_min(), std::move(taps));
}

PerturbRun perturb_and_analyze(const GroundTruthSystem& sys, const PerturbConfig& cfg) {
  cfg.validate();
  const PolyMatrix& A = sys.A;
  const std::size_t order = cfg.error_order.value_or(A.order());

  const Eigen::MatrixXd reference =
      sys.sigmas.empty() ? Eigen::MatrixXd() : majorized_sigma_grid(sys, cfg.K);

  PerturbRun run;
  run.trials.resize(cfg.trials);
  const unsigned outer = cfg.trials > 1 ? cfg.threads : 1;
  const unsigned inner = cfg.trials > 1 ? 1 : cfg.threads;

  parallel_for(cfg.trials, outer, [&](std::size_t trial) {
    SeededRng rng(cfg.seed, trial_stream(trial));
    PolyMatrix E;
    if (cfg.sigma2_e) {
      E = random_error(A.rows(), A.cols(), order, *cfg.sigma2_e, rng, A.n_min());
    } else if (*cfg.sigma2_norm == 0.0) {
      E = PolyMatrix::zero(A.rows(), A.cols());
    } else {
      E = scale_to_normalized(random_error(A.rows(), A.cols(), order, 1.0, rng, A.n_min()), A, *cfg.sigma2_norm);
    }
    const PolyMatrix perturbed = add(A, E);
    SvTrajectories tracks = majorized_trajectories(binwise_svd(perturbed, cfg.K, inner));

    TrialReport& rep = run.trials[trial];
    rep.trial = trial;
    rep.diag = diagnostics(tracks);
    rep.sigma2_norm_actual = normalized_variance(E, A);
    if (reference.size() > 0 && reference.rows() == tracks.values.rows()) {
      rep.sup_deviation = (tracks.values - reference).cwiseAbs().rowwise().maxCoeff();
    }
    if (trial + 1 == cfg.trials) {
      run.last_trajectories = std::move(tracks);
      run.last_perturbed = perturbed;
    }
  });
  return run;
}

std::vector<std::vector<double>> bin_histogram_trials(const GroundTruthSystem& sys, double omega0,
                                                      std::size_t trials, double sigma2_e, SeededRng& rng) {
  if (trials < 1) throw std::invalid_argument("bin_histogram_trials: trials must be >= 1");
  const PolyMatrix& A = sys.A;
  const auto r = static_cast<std::size_t>(std::min(A.rows(), A.cols()));
  std::vector<std::vector<double>> samples(r);
  for (auto& s : samples) s.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const PolyMatrix E = random_error(A.rows(), A.cols(), A.order(), sigma2_e, rng, A.n_min());
    const SvdResult s = svd(eval(add(A, E), omega0));
    for (std::size_t m = 0; m < r; ++m) samples[m].push_back(s.sigma(static_cast<Eigen::Index>(m)));
  }
  return samples;
}

namespace {

// exp(-y) I_nu(y) for nu in {0, 1}, y >= 0
double scaled_bessel_i(int nu, double y) {
  if (y < 500.0) return std::cyl_bessel_i(static_cast<double>(nu), y) * std::exp(-y);
  // large-argument expansion; five terms are exact to double precision here
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 5; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * y);
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * y);
}

// Laguerre L_{1/2}(-theta^2 / 2)
double laguerre_half(double theta) {
  const double t2 = theta * theta;
  const double y = t2 / 4.0;
  return (1.0 + t2 / 2.0) * scaled_bessel_i(0, y) + (t2 / 2.0) * scaled_bessel_i(1, y);
}

// var / s^2 as a function of theta = nu / s
double variance_factor(double theta) {
  const double l = laguerre_half(theta);
  return 2.0 + theta * theta - 0.5 * std::numbers::pi * l * l;
}

// mean^2 / var, strictly increasing from pi / (4 - pi) at theta = 0
double moment_ratio(double theta) {
  const double l = laguerre_half(theta);
  return 0.5 * std::numbers::pi * l * l / variance_factor(theta);
}

constexpr double kMaxTheta = 1e4;

}  // namespace

double rician_mean(double nu, double s) {
  if (s <= 0.0) return nu;
  return s * std::sqrt(0.5 * std::numbers::pi) * laguerre_half(nu / s);
}

double rician_variance(double nu, double s) {
  if (s <= 0.0) return 0.0;
  return s * s * variance_factor(nu / s);
}

RicianFit rician_fit(std::span<const double> samples) {
  if (samples.size() < 100) throw std::invalid_argument("rician_fit: need at least 100 samples");
  double mean = 0.0;
  for (double x : samples) {
    if (!(x >= 0.0)) throw std::invalid_argument("rician_fit: samples must be non-negative");
    mean += x;
  }
  const auto n = static_cast<double>(samples.size());
  mean /= n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= n;
  if (!(var > 0.0)) throw std::invalid_argument("rician_fit: zero sample variance");

  RicianFit fit;
  fit.n_samples = samples.size();
  const double target = mean * mean / var;
  if (target <= moment_ratio(0.0)) {
    fit.rayleigh = true;
    fit.nu = 0.0;
    fit.s = mean / std::sqrt(0.5 * std::numbers::pi);
  } else {
    double lo = 0.0;
    double hi = 1.0;
    while (moment_ratio(hi) < target && hi < kMaxTheta) hi = std::min(2.0 * hi, kMaxTheta);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (moment_ratio(mid) < target ? lo : hi) = mid;
    }
    const double theta = 0.5 * (lo + hi);
    fit.s = std::sqrt(var / variance_factor(theta));
    fit.nu = theta * fit.s;
  }
  fit.residual = std::max(std::abs(rician_mean(fit.nu, fit.s) - mean), std::abs(rician_variance(fit.nu, fit.s) - var));
  return fit;
}

StewartCheck stewart_bounds(const ComplexMatrix& A_bin, const ComplexMatrix& E_bin, Eigen::Index m, double rank_tol,
                            double tol) {
  if (A_bin.rows() != E_bin.rows() || A_bin.cols() != E_bin.cols()) {
    throw std::invalid_argument("stewart_bounds: dimension mismatch");
  }
  const Eigen::Index r = std::min(A_bin.rows(), A_bin.cols());
  if (m < 0 || m >= r) throw std::out_of_range("stewart_bounds: singular value index out of range");

  const SvdResult sa = svd(A_bin);
  const Projectors proj = colspace_projector(A_bin, rank_tol);
  const ComplexMatrix pe = proj.P * E_bin;
  const ComplexMatrix ppe = proj.P_perp * E_bin;

  StewartCheck c;
  c.sigma_true = sa.sigma(m);
  c.varsigma = svd(A_bin + E_bin).sigma(m);
  const double gamma_max = spectral_norm(pe);
  const double eta_max = spectral_norm(ppe);
  c.upper = std::sqrt((c.sigma_true + gamma_max) * (c.sigma_true + gamma_max) + eta_max * eta_max);
  const bool small = sa.sigma(0) <= 0.0 || c.sigma_true <= rank_tol * sa.sigma(0);
  c.lower = small ? smallest_sv(ppe) : 0.0;
  c.holds = c.lower - tol <= c.varsigma && c.varsigma <= c.upper + tol;
  return c;
}

nlohmann::json to_json(const TrialReport& r) {
  return {
      {"trial", r.trial},
      {"min_gap", r.diag.min_gap ? nlohmann::json(*r.diag.min_gap) : nlohmann::json(nullptr)},
      {"omega_gap", r.diag.omega_gap},
      {"min_smallest", r.diag.min_smallest},
      {"omega_smallest", r.diag.omega_smallest},
      {"sigma2_norm_actual", r.sigma2_norm_actual},
  };
}

nlohmann::json to_json(const RicianFit& f, std::size_t index) {
  return {{"index", index}, {"nu", f.nu}, {"s", f.s}, {"residual", f.residual}, {"n", f.n_samples},
          {"rayleigh", f.rayleigh}};
}

}  // namespace asvd
