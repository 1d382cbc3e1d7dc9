#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "asvd/polymat.hpp"
#include "asvd/rng.hpp"

namespace asvd {

/// A = U diag(sigmas) V^P with paraunitary U, V and parahermitian sigmas.
struct GroundTruthSystem {
  PolyMatrix U;
  std::vector<PolyMatrix> sigmas;
  PolyMatrix V;
  PolyMatrix A;
  /// Unit-circle closed forms omega -> sigma_m(e^{j omega}); fixtures only.
  std::vector<std::function<double(double)>> closed_forms;

  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> stream;
};

/// Real unit-circle values sigma_m(e^{j omega}) of the generator scalars.
Eigen::VectorXd sigma_values(const GroundTruthSystem& sys, double omega);

/// tracks x K grid of |sigma_m(e^{j omega_k})| sorted descending per bin: the
/// majorized ground truth that perturbed bin-wise values converge to.
Eigen::MatrixXd majorized_sigma_grid(const GroundTruthSystem& sys, std::size_t K);

/// Q(z) = (I - w w^H) + w w^H z^{-1}. Throws if |w| deviates from 1 by more than 1e-12.
PolyMatrix elementary_pu(const Eigen::VectorXcd& w);

/// Normalised i.i.d. complex Gaussian vector.
Eigen::VectorXcd random_unit_vector(Eigen::Index dim, SeededRng& rng);

/// Constant unitary matrix from the QR factor of a complex Gaussian matrix.
ComplexMatrix random_unitary(Eigen::Index dim, SeededRng& rng);

/// Product of `order` elementary paraunitary factors; order 0 gives a random
/// constant unitary matrix.
PolyMatrix random_paraunitary(Eigen::Index dim, std::size_t order, SeededRng& rng);

/// s(z) + s^P(z) with `len` CN(0, 1) taps of s at z^0 .. z^{-(len-1)}.
PolyMatrix random_parahermitian_scalar(std::size_t len, SeededRng& rng);

/// Builds A and checks the factor invariants at `tol`; throws
/// std::invalid_argument on a dimension or invariant violation.
GroundTruthSystem assemble(const PolyMatrix& U, const std::vector<PolyMatrix>& sigmas, const PolyMatrix& V,
                           double tol = 1e-10);

/// The 2x2 fixture with sigma_1 = z/4 + 1 + z^{-1}/4 and sigma_2 = -jz + jz^{-1}.
GroundTruthSystem example1();

struct BigSysShape {
  Eigen::Index dim = 6;
  std::size_t pu_order = 10;
  std::size_t sigma_len = 6;
};

/// Random 6x6 system: U, V of order 10, six parahermitian sigmas of order 10.
/// Draw order is U, then V, then sigma_1..sigma_M.
GroundTruthSystem bigsys(SeededRng& rng, const BigSysShape& shape = {});

/// Polymat JSON of A plus U, V, sigmas and {seed, stream, orders}.
nlohmann::json to_json(const GroundTruthSystem& sys);

}  // namespace asvd
