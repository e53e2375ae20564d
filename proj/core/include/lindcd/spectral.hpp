#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "lindcd/superop.hpp"
#include "lindcd/types.hpp"

namespace lindcd::spectral {

// Eigendecomposition of a (generally non-normal) generator into biorthonormal
// right/left pairs: M = sum_a lambda_a |R_a><L_a| with <L_a|R_b> = delta_ab,
// where the left rows are the rows of the inverse of the right-vector matrix.
// Eigenvalues are sorted by descending real part, then ascending |Im|, then
// descending Im, and each right vector's largest-magnitude component is made
// real positive to fix the scale/phase gauge.
struct JordanSpectrum {
  ops::BasisPtr basis;
  Vector eigenvalues;
  Matrix right;          // columns
  Matrix left;           // rows
  bool diagonalizable = false;
  double condition = 0.0;     // condition number of the right-vector matrix
  double max_residual = 0.0;  // max_a ||M R_a - lambda_a R_a|| / max(1, ||M||_F)

  Eigen::Index size() const { return eigenvalues.size(); }
};

struct DecomposeOptions {
  double cond_threshold = 1e8;
  double residual_threshold = 1e-8;
};

JordanSpectrum decompose(const ops::Superoperator& gen,
                         const DecomposeOptions& opt = {});

struct NoSteadyState : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AmbiguousSteadyState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Kernel vector of the generator normalized to unit trace.
struct SteadyState {
  Eigen::Index index;
  ops::CoherenceVector state;
};
SteadyState find_steady_state(const JordanSpectrum& sp, double tol = 1e-9);

// Match the blocks of `next` to the labels of `prev` by greedy assignment on
// the biorthogonal overlaps |<L_prev,a | R_next,b>|; within clusters of
// mutually degenerate eigenvalues the matched subspace is rotated to align
// with the previous right vectors (left rows co-rotated to keep
// biorthonormality). min_overlap below warn_threshold raises `warned`.
struct TrackResult {
  JordanSpectrum spectrum;        // next, relabeled into prev's order
  std::vector<int> permutation;   // permutation[label] = original index in next
  double min_overlap = 1.0;
  bool warned = false;
};
TrackResult track_spectrum(const JordanSpectrum& prev, const JordanSpectrum& next,
                           double warn_threshold = 0.5,
                           double degeneracy_tol = 1e-9);

// |<L_a | r>| for every block label a.
RealVector block_overlaps(const JordanSpectrum& sp, const ops::CoherenceVector& v);

// Decompose-and-track over an increasing grid of schedule points.
struct SpectrumTrack {
  std::vector<double> grid;
  std::vector<JordanSpectrum> spectra;  // consistently labeled
  double min_overlap = 1.0;
  int warnings = 0;
};
SpectrumTrack track_over_grid(
    const std::function<ops::Superoperator(double)>& gen_at,
    const std::vector<double>& grid, double warn_threshold = 0.5,
    double degeneracy_tol = 1e-9);

}  // namespace lindcd::spectral
