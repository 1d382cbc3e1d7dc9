#include "asvd/polymat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace asvd {

namespace {

void require_same_shape(const PolyMatrix& a, const PolyMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

void require_square(const PolyMatrix& a, const char* op) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(op) + ": matrix must be square");
  }
}

double tap_max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

PolyMatrix::PolyMatrix() : taps_{ComplexMatrix(0, 0)} {}

PolyMatrix::PolyMatrix(Eigen::Index rows, Eigen::Index cols, int n_min, std::vector<ComplexMatrix> taps)
    : rows_(rows), cols_(cols), n_min_(n_min), taps_(std::move(taps)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("PolyMatrix: negative dimension");
  if (taps_.empty()) throw std::invalid_argument("PolyMatrix: at least one tap is required");
  for (const auto& t : taps_) {
    if (t.rows() != rows || t.cols() != cols) throw std::invalid_argument("PolyMatrix: tap shape mismatch");
  }
}

PolyMatrix PolyMatrix::zero(Eigen::Index rows, Eigen::Index cols) {
  return PolyMatrix(rows, cols, 0, {ComplexMatrix::Zero(rows, cols)});
}

PolyMatrix PolyMatrix::identity(Eigen::Index n) { return PolyMatrix(n, n, 0, {ComplexMatrix::Identity(n, n)}); }

PolyMatrix PolyMatrix::monomial(const ComplexMatrix& coeff, int power) {
  return PolyMatrix(coeff.rows(), coeff.cols(), power, {coeff});
}

PolyMatrix PolyMatrix::scalar(int n_min, const std::vector<Complex>& coeffs) {
  std::vector<ComplexMatrix> taps;
  taps.reserve(coeffs.size());
  for (Complex c : coeffs) taps.push_back(ComplexMatrix::Constant(1, 1, c));
  return PolyMatrix(1, 1, n_min, std::move(taps));
}

ComplexMatrix PolyMatrix::coeff(int power) const {
  const int t = power - n_min_;
  if (t < 0 || t >= static_cast<int>(taps_.size())) return ComplexMatrix::Zero(rows_, cols_);
  return taps_[static_cast<std::size_t>(t)];
}

PolyMatrix PolyMatrix::entry(Eigen::Index i, Eigen::Index j) const {
  std::vector<ComplexMatrix> taps;
  taps.reserve(taps_.size());
  for (const auto& t : taps_) taps.push_back(ComplexMatrix::Constant(1, 1, t(i, j)));
  return PolyMatrix(1, 1, n_min_, std::move(taps));
}

bool PolyMatrix::is_zero() const {
  return std::all_of(taps_.begin(), taps_.end(), [](const ComplexMatrix& t) { return t.isZero(0.0); });
}

PolyMatrix add(const PolyMatrix& a, const PolyMatrix& b) {
  require_same_shape(a, b, "add");
  const int lo = std::min(a.n_min(), b.n_min());
  const int hi = std::max(a.n_max(), b.n_max());
  std::vector<ComplexMatrix> taps;
  taps.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int p = lo; p <= hi; ++p) taps.push_back(a.coeff(p) + b.coeff(p));
  return trim(PolyMatrix(a.rows(), a.cols(), lo, std::move(taps)));
}

PolyMatrix scale(const PolyMatrix& a, Complex c) {
  std::vector<ComplexMatrix> taps;
  taps.reserve(a.num_taps());
  for (const auto& t : a.taps()) taps.push_back(c * t);
  return trim(PolyMatrix(a.rows(), a.cols(), a.n_min(), std::move(taps)));
}

PolyMatrix subtract(const PolyMatrix& a, const PolyMatrix& b) {
  require_same_shape(a, b, "subtract");
  return add(a, scale(b, -1.0));
}

PolyMatrix mul(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("mul: inner dimensions do not match");
  const std::size_t ta = a.num_taps();
  const std::size_t tb = b.num_taps();
  std::vector<ComplexMatrix> taps(ta + tb - 1, ComplexMatrix::Zero(a.rows(), b.cols()));
  for (std::size_t i = 0; i < ta; ++i) {
    for (std::size_t k = 0; k < tb; ++k) taps[i + k].noalias() += a.tap(i) * b.tap(k);
  }
  return trim(PolyMatrix(a.rows(), b.cols(), a.n_min() + b.n_min(), std::move(taps)));
}

PolyMatrix shift(const PolyMatrix& a, int delay) {
  if (a.is_zero()) return a;
  return PolyMatrix(a.rows(), a.cols(), a.n_min() + delay, a.taps());
}

PolyMatrix parahermitian(const PolyMatrix& a) {
  std::vector<ComplexMatrix> taps;
  taps.reserve(a.num_taps());
  for (auto it = a.taps().rbegin(); it != a.taps().rend(); ++it) taps.push_back(it->adjoint());
  if (a.is_zero()) return PolyMatrix(a.cols(), a.rows(), 0, std::move(taps));
  return PolyMatrix(a.cols(), a.rows(), -a.n_max(), std::move(taps));
}

PolyMatrix diagonal(const std::vector<PolyMatrix>& diag, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(diag.size()) != std::min(rows, cols)) {
    throw std::invalid_argument("diagonal: need min(rows, cols) entries");
  }
  if (diag.empty()) return PolyMatrix::zero(rows, cols);
  int lo = diag.front().n_min();
  int hi = diag.front().n_max();
  for (const auto& d : diag) {
    if (d.rows() != 1 || d.cols() != 1) throw std::invalid_argument("diagonal: entries must be 1x1");
    lo = std::min(lo, d.n_min());
    hi = std::max(hi, d.n_max());
  }
  std::vector<ComplexMatrix> taps;
  for (int p = lo; p <= hi; ++p) {
    ComplexMatrix c = ComplexMatrix::Zero(rows, cols);
    for (std::size_t i = 0; i < diag.size(); ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      c(idx, idx) = diag[i].coeff(p)(0, 0);
    }
    taps.push_back(std::move(c));
  }
  return trim(PolyMatrix(rows, cols, lo, std::move(taps)));
}

ComplexMatrix eval(const PolyMatrix& a, double omega) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows(), a.cols());
  for (std::size_t t = 0; t < a.num_taps(); ++t) {
    const double power = static_cast<double>(a.n_min() + static_cast<int>(t));
    out += std::polar(1.0, -omega * power) * a.tap(t);
  }
  return out;
}

double grid_omega(std::size_t k, std::size_t K) {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(K);
}

std::vector<ComplexMatrix> eval_grid(const PolyMatrix& a, std::size_t K) {
  if (K == 0) throw std::invalid_argument("eval_grid: K must be >= 1");
  std::vector<ComplexMatrix> out;
  out.reserve(K);
  for (std::size_t k = 0; k < K; ++k) out.push_back(eval(a, grid_omega(k, K)));
  return out;
}

double frob_energy(const PolyMatrix& a) {
  double e = 0.0;
  for (const auto& t : a.taps()) e += t.squaredNorm();
  return e;
}

double max_abs_coeff(const PolyMatrix& a) {
  double m = 0.0;
  for (const auto& t : a.taps()) m = std::max(m, tap_max_abs(t));
  return m;
}

PolyMatrix trim(const PolyMatrix& a, double tol) {
  if (tol < 0.0) throw std::invalid_argument("trim: tolerance must be >= 0");
  const auto& taps = a.taps();
  std::size_t first = 0;
  std::size_t last = taps.size();
  while (first < last && tap_max_abs(taps[first]) <= tol) ++first;
  while (last > first && tap_max_abs(taps[last - 1]) <= tol) --last;
  if (first == last) return PolyMatrix::zero(a.rows(), a.cols());
  if (first == 0 && last == taps.size()) return a;
  return PolyMatrix(a.rows(), a.cols(), a.n_min() + static_cast<int>(first),
                    std::vector<ComplexMatrix>(taps.begin() + static_cast<std::ptrdiff_t>(first),
                                               taps.begin() + static_cast<std::ptrdiff_t>(last)));
}

double paraunitary_residual(const PolyMatrix& a) {
  require_square(a, "is_paraunitary");
  const PolyMatrix prod = mul(a, parahermitian(a));
  double r = 0.0;
  const int lo = std::min(prod.n_min(), 0);
  const int hi = std::max(prod.n_max(), 0);
  for (int p = lo; p <= hi; ++p) {
    ComplexMatrix c = prod.coeff(p);
    if (p == 0) c -= ComplexMatrix::Identity(a.rows(), a.cols());
    r = std::max(r, tap_max_abs(c));
  }
  return r;
}

double parahermitian_residual(const PolyMatrix& a) {
  require_square(a, "is_parahermitian");
  const PolyMatrix ap = parahermitian(a);
  const int lo = std::min(a.n_min(), ap.n_min());
  const int hi = std::max(a.n_max(), ap.n_max());
  double r = 0.0;
  for (int p = lo; p <= hi; ++p) r = std::max(r, tap_max_abs(a.coeff(p) - ap.coeff(p)));
  return r;
}

bool is_paraunitary(const PolyMatrix& a, double tol) { return paraunitary_residual(a) <= tol; }
bool is_parahermitian(const PolyMatrix& a, double tol) { return parahermitian_residual(a) <= tol; }

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) { return add(a, b); }
PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) { return subtract(a, b); }
PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) { return mul(a, b); }

nlohmann::json to_json(const PolyMatrix& a) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& t : a.taps()) {
    nlohmann::json tap = nlohmann::json::array();
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < t.cols(); ++j) row.push_back({t(i, j).real(), t(i, j).imag()});
      tap.push_back(std::move(row));
    }
    coeffs.push_back(std::move(tap));
  }
  return {{"M", a.rows()}, {"L", a.cols()}, {"n_min", a.n_min()}, {"coeffs", std::move(coeffs)}};
}

PolyMatrix polymat_from_json(const nlohmann::json& j) {
  const auto rows = j.at("M").get<Eigen::Index>();
  const auto cols = j.at("L").get<Eigen::Index>();
  const int n_min = j.at("n_min").get<int>();
  std::vector<ComplexMatrix> taps;
  for (const auto& tap : j.at("coeffs")) {
    if (static_cast<Eigen::Index>(tap.size()) != rows) throw std::invalid_argument("polymat json: row count mismatch");
    ComplexMatrix c(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto& row = tap.at(static_cast<std::size_t>(r));
      if (static_cast<Eigen::Index>(row.size()) != cols) {
        throw std::invalid_argument("polymat json: column count mismatch");
      }
      for (Eigen::Index q = 0; q < cols; ++q) {
        const auto& v = row.at(static_cast<std::size_t>(q));
        c(r, q) = Complex(v.at(0).get<double>(), v.at(1).get<double>());
      }
    }
    taps.push_back(std::move(c));
  }
  return PolyMatrix(rows, cols, n_min, std::move(taps));
}

}  // namespace asvd
