#include "asvd/sysid.hpp"

#include <algorithm>
#include <stdexcept>

#include "asvd/perturb.hpp"

namespace asvd {

namespace {

using Eigen::Index;

// Zero-state convolution of a causal B with the columns of x.
ComplexMatrix filter(const PolyMatrix& B, const ComplexMatrix& x) {
  if (B.n_min() < 0) throw std::invalid_argument("filter: system must be causal");
  const Index N = x.cols();
  ComplexMatrix out = ComplexMatrix::Zero(B.rows(), N);
  for (std::size_t t = 0; t < B.num_taps(); ++t) {
    const Index p = B.n_min() + static_cast<Index>(t);
    if (p >= N) break;
    out.middleCols(p, N - p).noalias() += B.tap(t) * x.leftCols(N - p);
  }
  return out;
}

// Columns X_n = [x[n]; x[n-1]; ...; x[n-J]] for n = J..N-1.
ComplexMatrix regressors(const ComplexMatrix& x, std::size_t J) {
  const Index L = x.rows();
  const Index N = x.cols();
  const auto Jj = static_cast<Index>(J);
  const Index n_eff = N - Jj;
  ComplexMatrix X(L * (Jj + 1), n_eff);
  for (Index j = 0; j <= Jj; ++j) X.middleRows(j * L, L) = x.middleCols(Jj - j, n_eff);
  return X;
}

// Coefficient difference a - b over the union support, untrimmed.
PolyMatrix difference(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("error_system: dimension mismatch");
  const int lo = std::min(a.n_min(), b.n_min());
  const int hi = std::max(a.n_max(), b.n_max());
  std::vector<ComplexMatrix> taps;
  taps.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int p = lo; p <= hi; ++p) taps.push_back(a.coeff(p) - b.coeff(p));
  return PolyMatrix(a.rows(), a.cols(), lo, std::move(taps));
}

}  // namespace

int causal_delay(const PolyMatrix& a) { return std::max(0, -a.n_min()); }

SignalFrame simulate(const PolyMatrix& A, std::size_t N, double sigma2_v, SeededRng& rng) {
  if (!(sigma2_v >= 0.0)) throw std::invalid_argument("simulate: sigma2_v must be >= 0");
  SignalFrame f;
  f.delay = causal_delay(A);
  const PolyMatrix causal = shift(A, f.delay);
  if (N <= static_cast<std::size_t>(std::max(causal.n_max(), 0))) {
    throw std::invalid_argument("simulate: N must exceed the order of the system");
  }
  const auto n = static_cast<Index>(N);
  f.N = N;
  f.sigma2_v = sigma2_v;
  f.x = rng.complex_gaussian(A.cols(), n, 1.0);
  f.y = filter(causal, f.x);
  if (sigma2_v > 0.0) f.y += rng.complex_gaussian(A.rows(), n, sigma2_v);
  return f;
}

SignalFrame simulate(const GroundTruthSystem& sys, std::size_t N, double sigma2_v, SeededRng& rng) {
  return simulate(sys.A, N, sigma2_v, rng);
}

WienerEstimate wiener_estimate(const SignalFrame& frame, std::size_t J_hat, std::optional<double> reg) {
  if (frame.N <= J_hat) throw std::invalid_argument("wiener_estimate: N must exceed J_hat");
  const Index L = frame.x.rows();
  const Index M = frame.y.rows();
  const auto J = static_cast<Index>(J_hat);
  const ComplexMatrix X = regressors(frame.x, J_hat);
  const Index n_eff = X.cols();
  const Index D = X.rows();

  ComplexMatrix Rxx = ComplexMatrix::Zero(D, D);
  Rxx.selfadjointView<Eigen::Lower>().rankUpdate(X, 1.0 / static_cast<double>(n_eff));
  Rxx = Rxx.selfadjointView<Eigen::Lower>();
  const ComplexMatrix Ryx = frame.y.middleCols(J, n_eff) * X.adjoint() / static_cast<double>(n_eff);

  const double lambda = reg.value_or(1e-10 * Rxx.trace().real() / static_cast<double>(D));
  if (!(lambda >= 0.0)) throw std::invalid_argument("wiener_estimate: regularisation must be >= 0");
  Rxx.diagonal().array() += lambda;

  Eigen::LDLT<ComplexMatrix> ldlt(Rxx);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-13)) {
    throw std::domain_error("wiener_estimate: singular normal equations");
  }
  // (R_xx + reg I) W^H = R_yx^H
  const ComplexMatrix W = ldlt.solve(ComplexMatrix(Ryx.adjoint())).adjoint();

  std::vector<ComplexMatrix> taps;
  taps.reserve(J_hat + 1);
  for (Index j = 0; j <= J; ++j) taps.push_back(W.middleCols(j * L, L));

  WienerEstimate est{PolyMatrix(M, L, 0, std::move(taps)), J_hat, lambda, frame.delay};
  return est;
}

PolyMatrix error_system(const WienerEstimate& est, const PolyMatrix& A) {
  return difference(shift(est.A_hat, -est.delay), A);
}

PolyMatrix error_system(const WienerEstimate& est, const GroundTruthSystem& sys) { return error_system(est, sys.A); }

double sample_mse(const SignalFrame& frame, const PolyMatrix& B, std::size_t J) {
  if (frame.N <= J) throw std::invalid_argument("sample_mse: N must exceed J");
  const auto n_eff = static_cast<Index>(frame.N - J);
  const ComplexMatrix r = filter(B, frame.x).rightCols(n_eff) - frame.y.rightCols(n_eff);
  return r.squaredNorm() / static_cast<double>(n_eff);
}

ComplexMatrix residual_cross_correlation(const SignalFrame& frame, const WienerEstimate& est) {
  const ComplexMatrix X = regressors(frame.x, est.J_hat);
  const Index n_eff = X.cols();
  const ComplexMatrix r = filter(est.A_hat, frame.x).rightCols(n_eff) - frame.y.rightCols(n_eff);
  return r * X.adjoint() / static_cast<double>(n_eff);
}

MseReport mse_decomposition(const SignalFrame& frame, const WienerEstimate& est, const GroundTruthSystem& sys) {
  if (est.A_hat.rows() != sys.A.rows() || est.A_hat.cols() != sys.A.cols()) {
    throw std::invalid_argument("mse_decomposition: dimension mismatch");
  }
  const PolyMatrix E = error_system(est, sys);
  MseReport r;
  r.N = frame.N;
  r.J_hat = est.J_hat;
  r.sigma2_v = frame.sigma2_v;
  r.xi_mse = sample_mse(frame, est.A_hat, est.J_hat);
  r.error_energy = frob_energy(E);
  r.noise_floor = static_cast<double>(sys.A.rows()) * frame.sigma2_v;
  r.decomposition_gap = std::abs(r.xi_mse - r.error_energy - r.noise_floor);
  r.sigma2_norm = normalized_variance(E, sys.A);
  return r;
}

nlohmann::json to_json(const MseReport& r) {
  return {{"N", r.N},
          {"J_hat", r.J_hat},
          {"sigma2_v", r.sigma2_v},
          {"xi_mse", r.xi_mse},
          {"error_energy", r.error_energy},
          {"noise_floor", r.noise_floor},
          {"decomposition_gap", r.decomposition_gap},
          {"sigma2_norm", r.sigma2_norm}};
}

}  // namespace asvd
