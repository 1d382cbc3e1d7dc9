#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace asvd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Default absolute tolerance used when trimming arithmetic results.
inline constexpr double kTrimTol = 1e-12;

/**
 * Laurent polynomial matrix
 *
 *   A(z) = sum_t C_t z^{-(n_min + t)},   t = 0 .. T-1
 *
 * Each tap C_t is a rows x cols complex matrix. A negative n_min means the
 * matrix carries positive powers of z (non-causal taps). The zero matrix is
 * stored with a single zero tap at n_min = 0.
 *
 * Values are immutable once constructed; every operation below returns a
 * new matrix.
 */
class PolyMatrix {
 public:
  /// 0x0 empty matrix with a single (empty) tap.
  PolyMatrix();

  /// Takes ownership of the taps. Throws std::invalid_argument if the tap
  /// list is empty or any tap has the wrong shape.
  PolyMatrix(Eigen::Index rows, Eigen::Index cols, int n_min, std::vector<ComplexMatrix> taps);

  static PolyMatrix zero(Eigen::Index rows, Eigen::Index cols);
  static PolyMatrix identity(Eigen::Index n);
  /// Single-tap matrix: coeff * z^{-power}.
  static PolyMatrix monomial(const ComplexMatrix& coeff, int power = 0);
  /// 1x1 matrix from scalar coefficients of z^{-n_min}, z^{-(n_min+1)}, ...
  static PolyMatrix scalar(int n_min, const std::vector<Complex>& coeffs);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  int n_min() const { return n_min_; }
  int n_max() const { return n_min_ + static_cast<int>(taps_.size()) - 1; }
  std::size_t num_taps() const { return taps_.size(); }
  /// Span of powers covered by the taps (T - 1).
  std::size_t order() const { return taps_.size() - 1; }

  const ComplexMatrix& tap(std::size_t t) const { return taps_[t]; }
  const std::vector<ComplexMatrix>& taps() const { return taps_; }

  /// Coefficient of z^{-power}; zero outside the stored support.
  ComplexMatrix coeff(int power) const;

  /// Entry (i, j) as a 1x1 polynomial matrix.
  PolyMatrix entry(Eigen::Index i, Eigen::Index j) const;

  bool is_zero() const;

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  int n_min_ = 0;
  std::vector<ComplexMatrix> taps_;
};

PolyMatrix add(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix subtract(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix scale(const PolyMatrix& a, Complex c);
PolyMatrix mul(const PolyMatrix& a, const PolyMatrix& b);

/// Multiplies by z^{-delay}: every power shifts by +delay.
PolyMatrix shift(const PolyMatrix& a, int delay);

/// A^P(z): conjugate-transpose each tap and reverse the power axis.
PolyMatrix parahermitian(const PolyMatrix& a);

/// Diagonal rows x cols matrix with 1x1 entries diag[i] on the main diagonal.
PolyMatrix diagonal(const std::vector<PolyMatrix>& diag, Eigen::Index rows, Eigen::Index cols);

/// A(e^{j omega}).
ComplexMatrix eval(const PolyMatrix& a, double omega);

/// A(e^{j omega_k}) for omega_k = 2 pi k / K, k = 0..K-1.
std::vector<ComplexMatrix> eval_grid(const PolyMatrix& a, std::size_t K);

/// Grid frequency 2 pi k / K.
double grid_omega(std::size_t k, std::size_t K);

/// Sum of squared coefficient magnitudes.
double frob_energy(const PolyMatrix& a);

/// Largest coefficient magnitude over all taps.
double max_abs_coeff(const PolyMatrix& a);

/// Strips leading/trailing taps whose largest magnitude is <= tol.
PolyMatrix trim(const PolyMatrix& a, double tol = kTrimTol);

/// Max coefficient magnitude of A A^P - I. Requires a square matrix.
double paraunitary_residual(const PolyMatrix& a);
/// Max coefficient magnitude of A - A^P. Requires a square matrix.
double parahermitian_residual(const PolyMatrix& a);

bool is_paraunitary(const PolyMatrix& a, double tol);
bool is_parahermitian(const PolyMatrix& a, double tol);

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);

// JSON: {"M", "L", "n_min", "coeffs": [tap][row][col] -> [re, im]}
nlohmann::json to_json(const PolyMatrix& a);
PolyMatrix polymat_from_json(const nlohmann::json& j);

}  // namespace asvd
