#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asvd/densela.hpp"
#include "asvd/polymat.hpp"

namespace asvd {

/// Ordinary SVDs of A(e^{j omega_k}) on the grid omega_k = 2 pi k / K.
struct BinwiseSvd {
  std::size_t K = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<double> omegas;
  std::vector<SvdResult> results;

  /// Number of singular-value tracks, min(rows, cols).
  Eigen::Index tracks() const { return std::min(rows, cols); }
};

/// Parallel over bins; results do not depend on the thread count.
BinwiseSvd binwise_svd(const PolyMatrix& a, std::size_t K, unsigned threads = 0);

enum class TrackMode { majorized, smooth };

std::string to_string(TrackMode mode);

/// Track identity/sign consistency between bin K-1 and bin 0 (smooth mode).
struct WrapReport {
  bool permutation_consistent = true;
  std::size_t sign_flips = 0;
};

/**
 * Singular-value tracks over the grid.
 *
 * values is tracks x K. In majorized mode each column is the descending SVD
 * output. In smooth mode tracks follow the singular subspaces across bins and
 * may go negative; permutations[k][t] is the SVD index assigned to track t at
 * bin k and signs(t, k) the sign applied to it. left[k] / right[k] hold the
 * per-track singular vectors (as columns) with phase alignment and sign
 * already applied, so that sum_t left[k].col(t) * values(t, k) *
 * right[k].col(t)^H reproduces A(e^{j omega_k}).
 */
struct SvTrajectories {
  TrackMode mode = TrackMode::majorized;
  std::vector<double> omegas;
  Eigen::MatrixXd values;
  std::vector<std::vector<Eigen::Index>> permutations;
  Eigen::MatrixXi signs;
  std::vector<ComplexMatrix> left;
  std::vector<ComplexMatrix> right;
  /// Bins where the association was ambiguous (AssociationAmbiguous warning).
  std::vector<std::size_t> ambiguous_bins;
  WrapReport wrap;

  Eigen::Index tracks() const { return values.rows(); }
  std::size_t bins() const { return omegas.size(); }
};

SvTrajectories majorized_trajectories(const BinwiseSvd& b);

struct SmoothOptions {
  /// Best vs. second-best match score margin below which a bin is flagged.
  double ambiguity_margin = 0.1;
  /// Singular values <= tiny_rel * sigma_max carry no usable right-vector
  /// phase; such bins do not update the sign reference.
  double tiny_rel = 1e-10;
};

SvTrajectories smooth_trajectories(const BinwiseSvd& b, const SmoothOptions& opts = {});

/// Grid minima of the majorized tracks.
struct DiagnosticsReport {
  std::optional<double> min_gap;  // absent for a single track
  double omega_gap = 0.0;
  Eigen::Index gap_pair = 0;      // gap between tracks gap_pair and gap_pair + 1
  double min_smallest = 0.0;
  double omega_smallest = 0.0;
  Eigen::MatrixXd gap_curves;     // (tracks - 1) x K
};

/// Throws std::invalid_argument for smooth-mode input.
DiagnosticsReport diagnostics(const SvTrajectories& t);

/// Per-track linear interpolation between neighbouring bins, wrapping at 2 pi.
Eigen::VectorXd interp_linear(const SvTrajectories& t, double omega);

/// Best track permutation and per-track global sign mapping smooth tracks
/// onto a reference (same shape, tracks x K). Exhaustive over permutations.
struct TrackAlignment {
  std::vector<Eigen::Index> perm;  // reference track t <- values row perm[t]
  std::vector<int> signs;
  double max_error = 0.0;
  Eigen::MatrixXd aligned;         // reference-ordered, sign-corrected values
};

TrackAlignment align_to_reference(const Eigen::MatrixXd& values, const Eigen::MatrixXd& reference);

/// CSV: omega,track_1..track_M[,ref_1..ref_M],mode with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const std::vector<double>& omegas, const Eigen::MatrixXd& values,
                          const std::string& mode_label, const Eigen::MatrixXd* reference = nullptr);
void write_trajectory_csv(std::ostream& os, const SvTrajectories& t);

}  // namespace asvd
