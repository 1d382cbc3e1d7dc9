#include "asvd/densela.hpp"

#include <stdexcept>

namespace asvd {

SvdResult svd(const ComplexMatrix& a) {
  if (!a.allFinite()) throw std::domain_error("svd: non-finite input");
  if (a.size() == 0) {
    return {ComplexMatrix::Identity(a.rows(), a.rows()), Eigen::VectorXd(0),
            ComplexMatrix::Identity(a.cols(), a.cols())};
  }
  // Two-sided Jacobi with QR preconditioning; small singular values come out
  // with high relative accuracy.
  Eigen::JacobiSVD<ComplexMatrix> jac(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {jac.matrixU(), jac.singularValues(), jac.matrixV()};
}

double spectral_norm(const ComplexMatrix& a) {
  const SvdResult r = svd(a);
  return r.sigma.size() == 0 ? 0.0 : r.sigma(0);
}

double smallest_sv(const ComplexMatrix& a) {
  const SvdResult r = svd(a);
  return r.sigma.size() == 0 ? 0.0 : r.sigma(r.sigma.size() - 1);
}

Projectors colspace_projector(const ComplexMatrix& a, double rank_tol) {
  if (!(rank_tol > 0.0)) throw std::invalid_argument("colspace_projector: rank_tol must be > 0");
  const SvdResult r = svd(a);
  const Eigen::Index m = a.rows();
  Eigen::Index rank = 0;
  if (r.sigma.size() > 0 && r.sigma(0) > 0.0) {
    const double thresh = rank_tol * r.sigma(0);
    while (rank < r.sigma.size() && r.sigma(rank) > thresh) ++rank;
  }
  const ComplexMatrix Ur = r.U.leftCols(rank);
  Projectors out;
  out.P = Ur * Ur.adjoint();
  out.P_perp = ComplexMatrix::Identity(m, m) - out.P;
  out.rank = rank;
  return out;
}

}  // namespace asvd
