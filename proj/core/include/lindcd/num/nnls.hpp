#pragma once

#include <stdexcept>
#include <vector>

#include "lindcd/types.hpp"

namespace lindcd::num {

struct ConvergenceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LsqResult {
  RealVector x;
  double residual_norm = 0.0;    // ||B x - y||_2 at the solution
  std::vector<int> active;       // constrained indices pinned at zero
  bool rank_deficient = false;   // some passive-set solve was rank deficient
  int iterations = 0;
};

// Least squares min ||B x - y|| with x_i >= 0 enforced on the indices flagged
// in `nonneg`; the remaining variables are unconstrained. Lawson-Hanson
// active-set iteration where free variables stay permanently passive and
// passive-set subproblems use a complete orthogonal decomposition, so rank
// deficiency yields the minimum-norm solution instead of failing.
LsqResult nnls_mixed(const RealMatrix& B, const RealVector& y,
                     const std::vector<bool>& nonneg);

}  // namespace lindcd::num
