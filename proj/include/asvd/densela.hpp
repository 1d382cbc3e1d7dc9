#pragma once

#include <Eigen/Dense>

#include "asvd/polymat.hpp"

namespace asvd {

/// Relative rank threshold (w.r.t. the largest singular value).
inline constexpr double kRankTol = 1e-10;

/// Full SVD A = U diag(sigma) V^H with sigma descending and non-negative.
struct SvdResult {
  ComplexMatrix U;       // rows x rows, unitary
  Eigen::VectorXd sigma; // min(rows, cols)
  ComplexMatrix V;       // cols x cols, unitary
};

/// Throws std::domain_error on NaN/Inf entries.
SvdResult svd(const ComplexMatrix& a);

double spectral_norm(const ComplexMatrix& a);
/// Smallest of the min(rows, cols) singular values; 0 for an empty matrix.
double smallest_sv(const ComplexMatrix& a);

struct Projectors {
  ComplexMatrix P;       // onto the column space of A
  ComplexMatrix P_perp;  // I - P
  Eigen::Index rank = 0;
};

/// Column-space projector from the left singular vectors whose singular
/// values exceed rank_tol * sigma_max.
Projectors colspace_projector(const ComplexMatrix& a, double rank_tol = kRankTol);

}  // namespace asvd
