#include "asvd/anasvd.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "asvd/parallel.hpp"

namespace asvd {

namespace {

using Eigen::Index;

struct Candidate {
  double score;
  Index track;
  Index triple;
};

// Greedy assignment: highest |<u_ref, u_cur>| first. Ties resolve by
// (track, triple) so the result is deterministic.
std::vector<Index> greedy_match(const Eigen::MatrixXd& score) {
  const Index r = score.rows();
  std::vector<Candidate> cands;
  cands.reserve(static_cast<std::size_t>(r * r));
  for (Index t = 0; t < r; ++t) {
    for (Index j = 0; j < r; ++j) cands.push_back({score(t, j), t, j});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  std::vector<Index> perm(static_cast<std::size_t>(r), -1);
  std::vector<bool> used(static_cast<std::size_t>(r), false);
  for (const auto& c : cands) {
    auto& slot = perm[static_cast<std::size_t>(c.track)];
    if (slot >= 0 || used[static_cast<std::size_t>(c.triple)]) continue;
    slot = c.triple;
    used[static_cast<std::size_t>(c.triple)] = true;
  }
  return perm;
}

bool is_ambiguous(const Eigen::MatrixXd& score, double margin) {
  const Index r = score.rows();
  if (r < 2) return false;
  for (Index t = 0; t < r; ++t) {
    double best = -1.0;
    double second = -1.0;
    for (Index j = 0; j < r; ++j) {
      const double s = score(t, j);
      if (s > best) {
        second = best;
        best = s;
      } else if (s > second) {
        second = s;
      }
    }
    if (best - second < margin) return true;
  }
  return false;
}

Eigen::MatrixXd match_scores(const std::vector<Eigen::VectorXcd>& refs, const ComplexMatrix& cur, Index r) {
  Eigen::MatrixXd score(r, r);
  for (Index t = 0; t < r; ++t) {
    for (Index j = 0; j < r; ++j) score(t, j) = std::abs(refs[static_cast<std::size_t>(t)].dot(cur.col(j)));
  }
  return score;
}

Complex unit_phase_conj(Complex c) {
  const double mag = std::abs(c);
  return mag > 0.0 ? std::conj(c) / mag : Complex(1.0, 0.0);
}

}  // namespace

std::string to_string(TrackMode mode) { return mode == TrackMode::majorized ? "majorized" : "smooth"; }

BinwiseSvd binwise_svd(const PolyMatrix& a, std::size_t K, unsigned threads) {
  if (K == 0) throw std::invalid_argument("binwise_svd: K must be >= 1");
  BinwiseSvd out;
  out.K = K;
  out.rows = a.rows();
  out.cols = a.cols();
  out.omegas.resize(K);
  out.results.resize(K);
  for (std::size_t k = 0; k < K; ++k) out.omegas[k] = grid_omega(k, K);
  parallel_for(K, threads, [&](std::size_t k) { out.results[k] = svd(eval(a, out.omegas[k])); });
  return out;
}

SvTrajectories majorized_trajectories(const BinwiseSvd& b) {
  const Index r = b.tracks();
  const auto K = static_cast<Index>(b.K);
  SvTrajectories out;
  out.mode = TrackMode::majorized;
  out.omegas = b.omegas;
  out.values.resize(r, K);
  out.left.reserve(b.K);
  out.right.reserve(b.K);
  for (std::size_t k = 0; k < b.K; ++k) {
    const auto& s = b.results[k];
    out.values.col(static_cast<Index>(k)) = s.sigma;
    out.left.push_back(s.U.leftCols(r));
    out.right.push_back(s.V.leftCols(r));
  }
  return out;
}

SvTrajectories smooth_trajectories(const BinwiseSvd& b, const SmoothOptions& opts) {
  const Index r = b.tracks();
  const auto K = static_cast<Index>(b.K);
  SvTrajectories out;
  out.mode = TrackMode::smooth;
  out.omegas = b.omegas;
  out.values.resize(r, K);
  out.signs.resize(r, K);
  out.permutations.reserve(b.K);
  out.left.reserve(b.K);
  out.right.reserve(b.K);
  if (b.K == 0 || r == 0) return out;

  const auto ru = static_cast<std::size_t>(r);
  std::vector<Eigen::VectorXcd> u_ref(ru);
  std::vector<Eigen::VectorXcd> v_ref(ru);
  std::vector<bool> v_valid(ru, false);
  std::vector<int> last_sign(ru, 1);
  std::vector<Index> perm(ru);
  for (Index t = 0; t < r; ++t) perm[static_cast<std::size_t>(t)] = t;

  auto is_tiny = [&](double sigma, double sigma_max) { return sigma_max <= 0.0 || sigma <= opts.tiny_rel * sigma_max; };

  for (Index k = 0; k < K; ++k) {
    const SvdResult& s = b.results[static_cast<std::size_t>(k)];
    const double sigma_max = s.sigma(0);
    bool ambiguous = false;
    if (k > 0) {
      const Eigen::MatrixXd score = match_scores(u_ref, s.U, r);
      ambiguous = is_ambiguous(score, opts.ambiguity_margin);
      if (ambiguous) {
        out.ambiguous_bins.push_back(static_cast<std::size_t>(k));
      } else {
        perm = greedy_match(score);
      }
    }

    ComplexMatrix left(b.rows, r);
    ComplexMatrix right(b.cols, r);
    for (Index t = 0; t < r; ++t) {
      const auto tu = static_cast<std::size_t>(t);
      const Index j = perm[tu];
      Eigen::VectorXcd u = s.U.col(j);
      Eigen::VectorXcd v = s.V.col(j);
      const double sigma = s.sigma(j);
      if (k > 0) {
        const Complex ph = unit_phase_conj(u_ref[tu].dot(u));
        u *= ph;
        v *= ph;
      }
      const bool tiny = is_tiny(sigma, sigma_max);
      int sign = last_sign[tu];
      if (!tiny && v_valid[tu]) sign = v_ref[tu].dot(v).real() < 0.0 ? -1 : 1;
      v *= static_cast<double>(sign);

      out.values(t, k) = sign * sigma;
      out.signs(t, k) = sign;
      left.col(t) = u;
      right.col(t) = v;

      last_sign[tu] = sign;
      if (!ambiguous) {
        u_ref[tu] = u;
        if (!tiny) {
          v_ref[tu] = v;
          v_valid[tu] = true;
        }
      }
    }
    out.permutations.push_back(perm);
    out.left.push_back(std::move(left));
    out.right.push_back(std::move(right));
  }

  // Continue the association one step from bin K-1 back onto bin 0.
  if (K >= 2) {
    const Eigen::MatrixXd score = match_scores(u_ref, out.left.front(), r);
    const std::vector<Index> wrap = greedy_match(score);
    const double sigma_max0 = b.results.front().sigma(0);
    for (Index t = 0; t < r; ++t) {
      const auto tu = static_cast<std::size_t>(t);
      const Index j = wrap[tu];
      if (j != t) out.wrap.permutation_consistent = false;
      if (!v_valid[tu] || is_tiny(std::abs(out.values(j, 0)), sigma_max0)) continue;
      const Complex ph = unit_phase_conj(u_ref[tu].dot(out.left.front().col(j)));
      const Eigen::VectorXcd v0 = out.right.front().col(j) * ph;
      if (v_ref[tu].dot(v0).real() < 0.0) ++out.wrap.sign_flips;
    }
  }
  return out;
}

DiagnosticsReport diagnostics(const SvTrajectories& t) {
  if (t.mode != TrackMode::majorized) throw std::invalid_argument("diagnostics: majorized trajectories required");
  const Index r = t.tracks();
  const Index K = t.values.cols();
  DiagnosticsReport d;
  if (r == 0 || K == 0) return d;

  d.min_smallest = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < K; ++k) {
    if (t.values(r - 1, k) < d.min_smallest) {
      d.min_smallest = t.values(r - 1, k);
      d.omega_smallest = t.omegas[static_cast<std::size_t>(k)];
    }
  }
  if (r < 2) return d;

  d.gap_curves = t.values.topRows(r - 1) - t.values.bottomRows(r - 1);
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < K; ++k) {
    for (Index m = 0; m + 1 < r; ++m) {
      if (d.gap_curves(m, k) < best) {
        best = d.gap_curves(m, k);
        d.omega_gap = t.omegas[static_cast<std::size_t>(k)];
        d.gap_pair = m;
      }
    }
  }
  d.min_gap = best;
  return d;
}

Eigen::VectorXd interp_linear(const SvTrajectories& t, double omega) {
  const Index K = t.values.cols();
  if (K == 0) return Eigen::VectorXd(t.tracks());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(omega, two_pi);
  if (w < 0.0) w += two_pi;
  double x = w * static_cast<double>(K) / two_pi;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-9) x = nearest;
  const double base = std::floor(x);
  const double frac = x - base;
  const Index k0 = static_cast<Index>(base) % K;
  const Index k1 = (k0 + 1) % K;
  if (frac == 0.0) return t.values.col(k0);
  return (1.0 - frac) * t.values.col(k0) + frac * t.values.col(k1);
}

TrackAlignment align_to_reference(const Eigen::MatrixXd& values, const Eigen::MatrixXd& reference) {
  if (values.rows() != reference.rows() || values.cols() != reference.cols()) {
    throw std::invalid_argument("align_to_reference: shape mismatch");
  }
  const Index r = values.rows();
  std::vector<Index> perm(static_cast<std::size_t>(r));
  for (Index t = 0; t < r; ++t) perm[static_cast<std::size_t>(t)] = t;

  TrackAlignment best;
  best.max_error = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    std::vector<int> signs(static_cast<std::size_t>(r));
    for (Index t = 0; t < r && worst < best.max_error; ++t) {
      const auto row = values.row(perm[static_cast<std::size_t>(t)]);
      const double plus = (row - reference.row(t)).cwiseAbs().maxCoeff();
      const double minus = (row + reference.row(t)).cwiseAbs().maxCoeff();
      signs[static_cast<std::size_t>(t)] = plus <= minus ? 1 : -1;
      worst = std::max(worst, std::min(plus, minus));
    }
    if (worst < best.max_error) {
      best.max_error = worst;
      best.perm = perm;
      best.signs = signs;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  best.aligned.resize(r, values.cols());
  for (Index t = 0; t < r; ++t) {
    const auto tu = static_cast<std::size_t>(t);
    best.aligned.row(t) = best.signs[tu] * values.row(best.perm[tu]);
  }
  if (r == 0) best.max_error = 0.0;
  return best;
}

void write_trajectory_csv(std::ostream& os, const std::vector<double>& omegas, const Eigen::MatrixXd& values,
                          const std::string& mode_label, const Eigen::MatrixXd* reference) {
  const Index r = values.rows();
  os << "omega";
  for (Index m = 0; m < r; ++m) os << ",track_" << (m + 1);
  if (reference != nullptr) {
    for (Index m = 0; m < reference->rows(); ++m) os << ",ref_" << (m + 1);
  }
  os << ",mode\n";
  const auto old_precision = os.precision(17);
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    const auto kk = static_cast<Index>(k);
    os << omegas[k];
    for (Index m = 0; m < r; ++m) os << ',' << values(m, kk);
    if (reference != nullptr) {
      for (Index m = 0; m < reference->rows(); ++m) os << ',' << (*reference)(m, kk);
    }
    os << ',' << mode_label << '\n';
  }
  os.precision(old_precision);
}

void write_trajectory_csv(std::ostream& os, const SvTrajectories& t) {
  write_trajectory_csv(os, t.omegas, t.values, to_string(t.mode));
}

}  // namespace asvd
