#include "lindcd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lindcd::spectral {

namespace {

// Largest-magnitude component made real positive; ties resolved to the
// smallest index so the gauge is deterministic.
void fix_column_gauge(Matrix& right, Eigen::Index col) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < right.rows(); ++i) {
    const double a = std::abs(right(i, col));
    if (a > best) {
      best = a;
      arg = i;
    }
  }
  if (best <= 0.0)
    return;
  const Complex phase = right(arg, col) / best;
  right.col(col) /= phase;
}

std::vector<std::vector<int>> degenerate_clusters(const Vector& lambda,
                                                  double tol_abs) {
  const int n = static_cast<int>(lambda.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(lambda(i) - lambda(j)) <= tol_abs)
        parent[find(i)] = find(j);
  std::vector<std::vector<int>> clusters(n);
  for (int i = 0; i < n; ++i)
    clusters[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& c : clusters)
    if (c.size() >= 2)
      out.push_back(std::move(c));
  return out;
}

}  // namespace

JordanSpectrum decompose(const ops::Superoperator& gen,
                         const DecomposeOptions& opt) {
  if (!gen.basis)
    throw std::invalid_argument("decompose: null basis");
  if (!gen.M.allFinite())
    throw std::invalid_argument("decompose: generator has non-finite entries");

  const Eigen::Index n = gen.M.rows();
  Eigen::ComplexEigenSolver<Matrix> ces(gen.M);
  if (ces.info() != Eigen::Success)
    throw std::runtime_error("decompose: eigensolver did not converge");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Vector& raw = ces.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Complex la = raw(a), lb = raw(b);
    if (la.real() != lb.real())
      return la.real() > lb.real();
    const double ia = std::abs(la.imag()), ib = std::abs(lb.imag());
    if (ia != ib)
      return ia < ib;
    return la.imag() > lb.imag();
  });

  JordanSpectrum sp;
  sp.basis = gen.basis;
  sp.eigenvalues.resize(n);
  sp.right.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sp.eigenvalues(k) = raw(order[static_cast<std::size_t>(k)]);
    sp.right.col(k) = ces.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    fix_column_gauge(sp.right, k);
  }

  // The |Im| tie-break above decides conjugate pairs only up to roundoff in
  // the solver output; normalize adjacent conjugates to +i before -i.
  const double pair_tol =
      1e-12 * std::max(1.0, sp.eigenvalues.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const Complex a = sp.eigenvalues(k), b = sp.eigenvalues(k + 1);
    if (std::abs(a.real() - b.real()) <= pair_tol &&
        std::abs(a.imag() + b.imag()) <= pair_tol && a.imag() < b.imag()) {
      std::swap(sp.eigenvalues(k), sp.eigenvalues(k + 1));
      sp.right.col(k).swap(sp.right.col(k + 1));
    }
  }

  const Eigen::JacobiSVD<Matrix> svd(sp.right);
  const double smin = svd.singularValues()(n - 1);
  const double smax = svd.singularValues()(0);
  sp.condition = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();

  if (std::isfinite(sp.condition) && sp.condition < 1e14) {
    sp.left = sp.right.partialPivLu().solve(Matrix::Identity(n, n));
  } else {
    // Defective or nearly so: fall back to the pseudo-inverse so downstream
    // diagnostics still have usable left rows.
    sp.left = sp.right.completeOrthogonalDecomposition().pseudoInverse();
  }

  const double scale = std::max(1.0, gen.M.norm());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double res = (gen.M * sp.right.col(k) - sp.eigenvalues(k) * sp.right.col(k)).norm();
    worst = std::max(worst, res);
  }
  sp.max_residual = worst / scale;
  sp.diagonalizable =
      sp.condition <= opt.cond_threshold && sp.max_residual <= opt.residual_threshold;
  return sp;
}

SteadyState find_steady_state(const JordanSpectrum& sp, double tol) {
  const double scale = std::max(1.0, sp.eigenvalues.cwiseAbs().maxCoeff());
  const double zero_tol = tol * scale;
  std::vector<Eigen::Index> zeros;
  for (Eigen::Index k = 0; k < sp.size(); ++k)
    if (std::abs(sp.eigenvalues(k)) < zero_tol)
      zeros.push_back(k);
  if (zeros.empty())
    throw NoSteadyState("find_steady_state: no eigenvalue within " +
                        std::to_string(zero_tol) + " of zero");
  if (zeros.size() > 1)
    throw AmbiguousSteadyState("find_steady_state: " + std::to_string(zeros.size()) +
                               " near-zero eigenvalues, steady state not unique");

  SteadyState out;
  out.index = zeros.front();
  out.state.basis = sp.basis;
  Vector v = sp.right.col(out.index);
  const Complex trace = static_cast<double>(sp.basis->dim) * v(0);
  if (std::abs(trace) < 1e-12 * v.norm())
    throw NoSteadyState("find_steady_state: kernel vector has zero trace");
  out.state.r = v / trace;
  return out;
}

TrackResult track_spectrum(const JordanSpectrum& prev, const JordanSpectrum& next,
                           double warn_threshold, double degeneracy_tol) {
  if (prev.size() != next.size())
    throw std::invalid_argument("track_spectrum: size mismatch");
  const Eigen::Index n = prev.size();

  RealMatrix overlap(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      overlap(a, b) = std::abs((prev.left.row(a) * next.right.col(b))(0, 0));

  // Greedy assignment, largest overlap first; deterministic tie-breaking by
  // smallest (a, b).
  std::vector<int> perm(static_cast<std::size_t>(n), -1);
  std::vector<bool> a_done(static_cast<std::size_t>(n), false);
  std::vector<bool> b_done(static_cast<std::size_t>(n), false);
  for (Eigen::Index round = 0; round < n; ++round) {
    int best_a = -1, best_b = -1;
    double best = -1.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      if (a_done[static_cast<std::size_t>(a)])
        continue;
      for (Eigen::Index b = 0; b < n; ++b) {
        if (b_done[static_cast<std::size_t>(b)])
          continue;
        if (overlap(a, b) > best) {
          best = overlap(a, b);
          best_a = static_cast<int>(a);
          best_b = static_cast<int>(b);
        }
      }
    }
    perm[static_cast<std::size_t>(best_a)] = best_b;
    a_done[static_cast<std::size_t>(best_a)] = true;
    b_done[static_cast<std::size_t>(best_b)] = true;
  }

  TrackResult out;
  out.permutation = perm;
  out.spectrum.basis = next.basis;
  out.spectrum.diagonalizable = next.diagonalizable;
  out.spectrum.condition = next.condition;
  out.spectrum.max_residual = next.max_residual;
  out.spectrum.eigenvalues.resize(n);
  out.spectrum.right.resize(n, n);
  out.spectrum.left.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const int b = perm[static_cast<std::size_t>(a)];
    out.spectrum.eigenvalues(a) = next.eigenvalues(b);
    out.spectrum.right.col(a) = next.right.col(b);
    out.spectrum.left.row(a) = next.left.row(b);
  }

  // Within a degenerate cluster any basis of the eigenspace is admissible;
  // rotate the matched block onto the previous right vectors to keep labels
  // continuous, and co-rotate the left rows to preserve biorthonormality.
  const double scale = std::max(1.0, next.eigenvalues.cwiseAbs().maxCoeff());
  for (const auto& cluster :
       degenerate_clusters(out.spectrum.eigenvalues, degeneracy_tol * scale)) {
    const Eigen::Index k = static_cast<Eigen::Index>(cluster.size());
    Matrix nb(n, k), pb(n, k), lb(k, n);
    for (Eigen::Index c = 0; c < k; ++c) {
      nb.col(c) = out.spectrum.right.col(cluster[static_cast<std::size_t>(c)]);
      pb.col(c) = prev.right.col(cluster[static_cast<std::size_t>(c)]);
      lb.row(c) = out.spectrum.left.row(cluster[static_cast<std::size_t>(c)]);
    }
    const Matrix rot = (nb.adjoint() * nb).ldlt().solve(nb.adjoint() * pb);
    const Eigen::FullPivLU<Matrix> lu(rot);
    if (!lu.isInvertible())
      continue;  // previous block not representable; keep the raw match
    const Matrix aligned = nb * rot;
    const Matrix lrot = lu.solve(lb);
    for (Eigen::Index c = 0; c < k; ++c) {
      out.spectrum.right.col(cluster[static_cast<std::size_t>(c)]) = aligned.col(c);
      out.spectrum.left.row(cluster[static_cast<std::size_t>(c)]) = lrot.row(c);
    }
  }

  double min_overlap = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < n; ++a) {
    const double o = std::abs((prev.left.row(a) * out.spectrum.right.col(a))(0, 0));
    min_overlap = std::min(min_overlap, o);
  }
  out.min_overlap = min_overlap;
  out.warned = min_overlap < warn_threshold;
  return out;
}

RealVector block_overlaps(const JordanSpectrum& sp, const ops::CoherenceVector& v) {
  if (v.r.size() != sp.size())
    throw std::invalid_argument("block_overlaps: size mismatch");
  return (sp.left * v.r).cwiseAbs();
}

SpectrumTrack track_over_grid(
    const std::function<ops::Superoperator(double)>& gen_at,
    const std::vector<double>& grid, double warn_threshold,
    double degeneracy_tol) {
  if (grid.size() < 2)
    throw std::invalid_argument("track_over_grid: need at least two grid points");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1]))
      throw std::invalid_argument("track_over_grid: grid must be strictly increasing");

  SpectrumTrack track;
  track.grid = grid;
  track.spectra.reserve(grid.size());
  track.spectra.push_back(decompose(gen_at(grid[0])));
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const JordanSpectrum sp = decompose(gen_at(grid[k]));
    TrackResult step =
        track_spectrum(track.spectra.back(), sp, warn_threshold, degeneracy_tol);
    track.min_overlap = std::min(track.min_overlap, step.min_overlap);
    if (step.warned)
      ++track.warnings;
    track.spectra.push_back(std::move(step.spectrum));
  }
  return track;
}

}  // namespace lindcd::spectral
