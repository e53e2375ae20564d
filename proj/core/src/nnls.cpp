#include "lindcd/num/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lindcd::num {

namespace {

RealMatrix select_columns(const RealMatrix& B, const std::vector<int>& idx) {
  RealMatrix sub(B.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k)
    sub.col(static_cast<Eigen::Index>(k)) = B.col(idx[k]);
  return sub;
}

}  // namespace

LsqResult nnls_mixed(const RealMatrix& B, const RealVector& y,
                     const std::vector<bool>& nonneg) {
  const int n = static_cast<int>(B.cols());
  if (y.size() != B.rows())
    throw std::invalid_argument("nnls_mixed: row count mismatch");
  if (static_cast<int>(nonneg.size()) != n)
    throw std::invalid_argument("nnls_mixed: constraint mask size mismatch");

  LsqResult out;
  out.x = RealVector::Zero(n);

  std::vector<bool> passive(nonneg.size());
  for (int i = 0; i < n; ++i)
    passive[i] = !nonneg[i];  // unconstrained variables never leave the passive set

  const auto passive_indices = [&]() {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (passive[i]) idx.push_back(i);
    return idx;
  };

  // Minimum-norm least squares on the passive set, scattered back into z.
  const auto solve_passive = [&](const std::vector<int>& idx, RealVector& z) {
    z.setZero(n);
    if (idx.empty())
      return;
    const RealMatrix sub = select_columns(B, idx);
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(sub);
    if (cod.rank() < static_cast<Eigen::Index>(idx.size()))
      out.rank_deficient = true;
    const RealVector zi = cod.solve(y);
    for (std::size_t k = 0; k < idx.size(); ++k)
      z(idx[k]) = zi(static_cast<Eigen::Index>(k));
  };

  RealVector z(n);
  solve_passive(passive_indices(), out.x);
  // A rank-deficient free-only solve can park a constrained coordinate at
  // zero already; those stay handled by the main loop below.

  const double grad_tol = 1e-10 * std::max(1.0, (B.transpose() * y).cwiseAbs().maxCoeff());
  const int max_iter = 10 * std::max(n, 1);

  while (true) {
    if (++out.iterations > max_iter)
      throw ConvergenceFailure("nnls_mixed: active-set iteration cap exceeded");

    const RealVector w = B.transpose() * (y - B * out.x);
    int enter = -1;
    double best = grad_tol;
    for (int i = 0; i < n; ++i) {
      if (!passive[i] && w(i) > best) {
        best = w(i);
        enter = i;
      }
    }
    if (enter < 0)
      break;
    passive[enter] = true;

    // Inner loop: retreat along the segment x -> z until the passive-set
    // solution is feasible for every constrained passive variable.
    while (true) {
      const std::vector<int> idx = passive_indices();
      solve_passive(idx, z);

      double alpha = 1.0;
      for (int i : idx) {
        if (nonneg[i] && z(i) <= 0.0) {
          const double denom = out.x(i) - z(i);
          if (denom > 0.0)
            alpha = std::min(alpha, out.x(i) / denom);
        }
      }
      if (alpha >= 1.0) {
        out.x = z;
        break;
      }
      out.x += alpha * (z - out.x);
      // The binding coordinate lands at zero up to roundoff; sweep up any
      // constrained passive variable that reached the boundary with it.
      const double tol_x = 1e-12 * std::max(1.0, out.x.cwiseAbs().maxCoeff());
      bool dropped = false;
      for (int i : idx) {
        if (nonneg[i] && passive[i] && out.x(i) <= tol_x) {
          out.x(i) = 0.0;
          passive[i] = false;
          dropped = true;
        }
      }
      if (!dropped) {
        // Numerical stalemate: pin the most negative offender directly.
        int worst = -1;
        double low = 0.0;
        for (int i : idx) {
          if (nonneg[i] && z(i) < low) {
            low = z(i);
            worst = i;
          }
        }
        if (worst < 0) {
          out.x = z;
          break;
        }
        out.x(worst) = 0.0;
        passive[worst] = false;
      }
    }
  }

  for (int i = 0; i < n; ++i)
    if (nonneg[i] && !passive[i]) out.active.push_back(i);
  out.residual_norm = (B * out.x - y).norm();
  return out;
}

}  // namespace lindcd::num
