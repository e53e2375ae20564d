#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lindcd/models.hpp"
#include "lindcd/spectral.hpp"
#include "lindcd/superop.hpp"

namespace lindcd::cd {

using GeneratorFn = std::function<ops::Superoperator(double)>;

// Central-difference derivative of a generator with a half-step consistency
// check; falls back to one-sided second-order stencils at the interval ends.
struct DerivativeResult {
  ops::Superoperator value;
  double richardson_error = 0.0;  // relative h vs h/2 discrepancy
  bool reliable = true;
};
DerivativeResult generator_derivative(const GeneratorFn& gen_at, double s,
                                      double step = 1e-5,
                                      double reliable_tol = 1e-4);

// Exact gauge superoperator from the spectral form of the generator:
// A = sum_{a != b} <L_b| dL |R_a> / (lambda_a - lambda_b) |R_b><L_a|.
// Pairs with |lambda_a - lambda_b| below degeneracy_tol * max|lambda| are
// skipped and counted. Requires a diagonalizable spectrum.
struct ExactGauge {
  ops::Superoperator gauge;
  int skipped_pairs = 0;
};
ExactGauge exact_gauge(const spectral::JordanSpectrum& sp,
                       const ops::Superoperator& dgen,
                       double degeneracy_tol = 1e-9);

// One term of the variational ansatz: either a Hamiltonian contribution
// rho -> -i[G, rho] with a free real coefficient, or a dissipative channel
// rho -> G rho G^dag - {G^dag G, rho}/2 whose coefficient (a squared rate)
// must stay nonnegative.
struct AnsatzTerm {
  enum class Kind { Unitary, Dissipative };
  Kind kind = Kind::Unitary;
  Matrix op;
  std::string name;
};
AnsatzTerm unitary_term(Matrix op, std::string name);
AnsatzTerm dissipative_term(Matrix op, std::string name);

ops::Superoperator ansatz_superop(const AnsatzTerm& term, ops::BasisPtr basis);

// Named ansatz families used by the run configurations.
//   "Sy"                one unitary sigma_y / S_y term
//   "Sy3"               unitary S_y and S_y^3 terms
//   "SxSySz_cyclic"     unitary S_y, S_y^3 and S_x S_y S_z + h.c. terms
//   "basis_dissipators" purely dissipative: every non-identity basis element
//                       as a channel, no unitary part
std::vector<AnsatzTerm> named_ansatz(const std::string& name,
                                     const models::AnnealingScenario& sc);

// Every name accepted by named_ansatz.
const std::vector<std::string>& ansatz_names();

// Normal-equation ingredients for min_x || sum_i x_i BB_i - Y ||_F with
// BB_i = [[A_i, L], L] and Y = [dL, L]; matrices are flattened column-major
// with real and imaginary parts stacked, so the problem is a real least
// squares with sign constraints on the dissipative coefficients.
struct LsqSystem {
  RealMatrix columns;
  RealVector target;
  std::vector<bool> nonneg;
};
LsqSystem assemble_lsq(const ops::Superoperator& gen,
                       const ops::Superoperator& dgen,
                       const std::vector<AnsatzTerm>& terms,
                       ops::BasisPtr basis);

struct VariationalSolution {
  RealVector coefficients;
  double residual = 0.0;          // ||B x - Y||_F at the optimum
  double residual_at_zero = 0.0;  // ||Y||_F, the no-driving baseline
  std::vector<int> active;        // dissipative terms pinned at zero
  bool rank_deficient = false;
};
VariationalSolution solve_variational(const LsqSystem& sys);

// Commutator residual || [dL - [A, L], L] ||_F; zero iff the gauge removes
// every off-diagonal matrix element of dL between blocks of L.
double gauge_residual(const ops::Superoperator& gauge,
                      const ops::Superoperator& gen,
                      const ops::Superoperator& dgen);

// Closed-system reference gauge coefficient for the qubit schedule,
// a(s) = -dq / (1 - 2q + 2q^2), in the convention where the velocity term
// enters as a(s) sigma_y. The coefficient that zeroes gauge_residual is
// a(s) / 2 (the two conventions differ by that fixed factor).
double closed_system_gauge_qubit(double s, const models::QubitModel& m);

// Schedule-resolved gauge provider for the propagator. Exact mode rebuilds
// the generator, its spectrum and the spectral-form gauge at every call;
// variational mode solves the constrained least squares on a fixed grid once
// and interpolates the coefficients (the ansatz superoperators do not depend
// on s).
class GaugeProvider {
 public:
  enum class Mode { None, Exact, Variational };

  static GaugeProvider none();
  static GaugeProvider exact(const models::AnnealingScenario& sc,
                             double fd_step = 1e-5,
                             double degeneracy_tol = 1e-9);
  static GaugeProvider variational(const models::AnnealingScenario& sc,
                                   std::vector<AnsatzTerm> terms,
                                   int grid_points = 201,
                                   double fd_step = 1e-5);

  Mode mode() const { return mode_; }
  Matrix gauge(double s) const;  // supermatrix of A_s (zero matrix for None)

  // Variational-mode introspection; empty otherwise.
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<VariationalSolution>& solutions() const { return solutions_; }
  const std::vector<AnsatzTerm>& terms() const { return terms_; }

 private:
  GaugeProvider() = default;

  Mode mode_ = Mode::None;
  int dim_ = 0;
  models::AnnealingScenario scenario_;
  double fd_step_ = 1e-5;
  double degeneracy_tol_ = 1e-9;
  std::vector<AnsatzTerm> terms_;
  std::vector<Matrix> term_superops_;
  std::vector<double> grid_;
  std::vector<VariationalSolution> solutions_;
};

// Thermal-invariance diagnostic of the solved dissipative channel: the norm
// of the dissipative part of the gauge applied to the instantaneous Gibbs
// state, normalized by the channel's own norm. A detailed-balanced channel
// leaves the Gibbs state invariant, so values near zero indicate the
// optimizer picked thermodynamically consistent rates. The ratio is
// scale-free; read it against channel_norm, which tells whether the solved
// rates are large enough to matter at all.
struct ThermalInvarianceReport {
  std::vector<double> grid;
  std::vector<double> residual;
  std::vector<double> channel_norm;  // Frobenius norm of the channel per point
  double max_residual = 0.0;
  double max_channel_norm = 0.0;
};
ThermalInvarianceReport thermal_invariance_report(
    const models::AnnealingScenario& sc, const GaugeProvider& provider);

}  // namespace lindcd::cd
