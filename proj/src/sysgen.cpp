#include "asvd/sysgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace asvd {

Eigen::VectorXd sigma_values(const GroundTruthSystem& sys, double omega) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(sys.sigmas.size()));
  for (std::size_t m = 0; m < sys.sigmas.size(); ++m) {
    out(static_cast<Eigen::Index>(m)) = eval(sys.sigmas[m], omega)(0, 0).real();
  }
  return out;
}

Eigen::MatrixXd majorized_sigma_grid(const GroundTruthSystem& sys, std::size_t K) {
  const auto r = static_cast<Eigen::Index>(sys.sigmas.size());
  Eigen::MatrixXd out(r, static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    Eigen::VectorXd v = sigma_values(sys, grid_omega(k, K)).cwiseAbs();
    std::sort(v.begin(), v.end(), std::greater<>());
    out.col(static_cast<Eigen::Index>(k)) = v;
  }
  return out;
}

PolyMatrix elementary_pu(const Eigen::VectorXcd& w) {
  if (std::abs(w.norm() - 1.0) > 1e-12) throw std::invalid_argument("elementary_pu: w must have unit norm");
  const Eigen::Index dim = w.size();
  const ComplexMatrix wwh = w * w.adjoint();
  return PolyMatrix(dim, dim, 0, {ComplexMatrix::Identity(dim, dim) - wwh, wwh});
}

Eigen::VectorXcd random_unit_vector(Eigen::Index dim, SeededRng& rng) {
  Eigen::VectorXcd w = rng.complex_gaussian(dim, 1);
  return w / w.norm();
}

ComplexMatrix random_unitary(Eigen::Index dim, SeededRng& rng) {
  const ComplexMatrix g = rng.complex_gaussian(dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix& r = qr.matrixQR();
  // fix column phases so the distribution is Haar
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0.0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

PolyMatrix random_paraunitary(Eigen::Index dim, std::size_t order, SeededRng& rng) {
  if (order == 0) return PolyMatrix::monomial(random_unitary(dim, rng));
  PolyMatrix out = elementary_pu(random_unit_vector(dim, rng));
  for (std::size_t i = 1; i < order; ++i) out = mul(out, elementary_pu(random_unit_vector(dim, rng)));
  return out;
}

PolyMatrix random_parahermitian_scalar(std::size_t len, SeededRng& rng) {
  if (len == 0) throw std::invalid_argument("random_parahermitian_scalar: len must be >= 1");
  std::vector<Complex> taps(len);
  for (auto& c : taps) c = rng.complex_normal(1.0);
  const PolyMatrix s = PolyMatrix::scalar(0, taps);
  return add(s, parahermitian(s));
}

GroundTruthSystem assemble(const PolyMatrix& U, const std::vector<PolyMatrix>& sigmas, const PolyMatrix& V,
                           double tol) {
  if (U.rows() != U.cols() || V.rows() != V.cols()) throw std::invalid_argument("assemble: U and V must be square");
  const Eigen::Index rank = std::min(U.rows(), V.rows());
  if (static_cast<Eigen::Index>(sigmas.size()) != rank) {
    throw std::invalid_argument("assemble: expected " + std::to_string(rank) + " singular values");
  }
  if (!is_paraunitary(U, tol)) throw std::invalid_argument("assemble: U is not paraunitary");
  if (!is_paraunitary(V, tol)) throw std::invalid_argument("assemble: V is not paraunitary");
  for (const auto& s : sigmas) {
    if (s.rows() != 1 || s.cols() != 1) throw std::invalid_argument("assemble: singular values must be 1x1");
    if (!is_parahermitian(s, tol)) throw std::invalid_argument("assemble: singular value is not parahermitian");
  }
  GroundTruthSystem sys;
  sys.U = U;
  sys.sigmas = sigmas;
  sys.V = V;
  sys.A = mul(mul(U, diagonal(sigmas, U.rows(), V.rows())), parahermitian(V));
  return sys;
}

GroundTruthSystem example1() {
  const double h = 1.0 / std::sqrt(2.0);
  ComplexMatrix u(2, 2);
  u << h, h, h, -h;
  ComplexMatrix v(2, 2);
  v << h, h, -h, h;
  const Complex j(0.0, 1.0);
  // coefficients of z^{1}, z^{0}, z^{-1}
  const PolyMatrix s1 = PolyMatrix::scalar(-1, {0.25, 1.0, 0.25});
  const PolyMatrix s2 = PolyMatrix::scalar(-1, {-j, 0.0, j});
  GroundTruthSystem sys = assemble(PolyMatrix::monomial(u), {s1, s2}, PolyMatrix::monomial(v), 1e-12);
  sys.closed_forms = {[](double w) { return 1.0 + 0.5 * std::cos(w); }, [](double w) { return 2.0 * std::sin(w); }};
  return sys;
}

GroundTruthSystem bigsys(SeededRng& rng, const BigSysShape& shape) {
  const PolyMatrix U = random_paraunitary(shape.dim, shape.pu_order, rng);
  const PolyMatrix V = random_paraunitary(shape.dim, shape.pu_order, rng);
  std::vector<PolyMatrix> sigmas;
  sigmas.reserve(static_cast<std::size_t>(shape.dim));
  for (Eigen::Index m = 0; m < shape.dim; ++m) sigmas.push_back(random_parahermitian_scalar(shape.sigma_len, rng));
  GroundTruthSystem sys = assemble(U, sigmas, V);
  sys.seed = rng.seed();
  sys.stream = rng.stream();
  return sys;
}

nlohmann::json to_json(const GroundTruthSystem& sys) {
  nlohmann::json j = to_json(sys.A);
  nlohmann::json sig = nlohmann::json::array();
  std::size_t sigma_order = 0;
  for (const auto& s : sys.sigmas) {
    sig.push_back(to_json(s));
    sigma_order = std::max(sigma_order, s.order());
  }
  j["U"] = to_json(sys.U);
  j["V"] = to_json(sys.V);
  j["sigmas"] = std::move(sig);
  j["metadata"] = {
      {"seed", sys.seed ? nlohmann::json(*sys.seed) : nlohmann::json(nullptr)},
      {"stream", sys.stream ? nlohmann::json(*sys.stream) : nlohmann::json(nullptr)},
      {"orders", {{"U", sys.U.order()}, {"V", sys.V.order()}, {"sigma", sigma_order}, {"A", sys.A.order()}}},
  };
  return j;
}

}  // namespace asvd
