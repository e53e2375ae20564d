#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "lindcd/counterdiabatic.hpp"
#include "lindcd/models.hpp"

namespace lindcd::evo {

// Adaptive stepping collapsed below the representable step size; the
// dynamics is too stiff for the explicit integrator at these tolerances.
struct StiffFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The propagated state stopped being a sensible density matrix (trace drift
// beyond the accepted band).
struct IntegrationInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An observable was evaluated on inputs that are not valid states.
struct InvalidState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class InitialState { Ground, Thermal };

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.0;              // fraction of s, 0 = uncapped
  int samples = 201;                  // stored points, uniform in s
  std::string generator_eval = "auto";  // "auto" | "exact" | "grid"
  int generator_grid_points = 201;    // nodes when interpolating the generator
};

// Ground: projector onto the lowest eigenvector of H(0).
// Thermal: Gibbs state of H(0) at the bath temperature (requires a bath).
ops::CoherenceVector initial_state(const models::AnnealingScenario& sc,
                                   InitialState kind);

struct Trajectory {
  models::AnnealingScenario scenario;
  double tau = 0.0;  // annealing time, ns
  std::vector<double> s;
  std::vector<ops::CoherenceVector> states;
  long steps_accepted = 0;
  long steps_rejected = 0;
  long rhs_evaluations = 0;
  double max_trace_drift = 0.0;
};

// Integrates d r / d s = (tau L(s) + A(s)) r from s = 0 to 1 with the
// Dormand-Prince stepper, landing exactly on each sample point. The
// generator is rebuilt exactly per evaluation for two-level systems and
// interpolated from a uniform grid otherwise (policy "auto").
Trajectory evolve(const models::AnnealingScenario& sc,
                  const cd::GaugeProvider& gauge, double tau,
                  const IntegratorConfig& cfg = {},
                  InitialState start = InitialState::Ground);

// Population of the instantaneous ground eigenspace; degenerate levels
// within degeneracy_tol (relative to the spectral spread) are summed and the
// multiplicity reported through `multiplicity` when given.
double ground_state_probability(const Matrix& rho, const Matrix& h,
                                double degeneracy_tol = 1e-9,
                                int* multiplicity = nullptr);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. Inputs must be
// Hermitian with unit trace to 1e-6; eigenvalues down to -1e-8 are treated
// as roundoff and clipped to zero.
double uhlmann_fidelity(const Matrix& rho, const Matrix& sigma);

struct CptpDiagnostics {
  double trace_error = 0.0;      // |Tr rho - 1|
  double min_eigenvalue = 0.0;   // of the hermitized state
  double hermiticity = 0.0;      // relative defect
};
CptpDiagnostics cptp_diagnostics(const ops::CoherenceVector& v);

struct Observables {
  std::vector<double> s;
  RealVector p_minus;        // instantaneous ground-state population
  RealVector fidelity;       // against Gibbs (open) or ground (closed) target
  RealVector trace_error;
  RealVector min_eig;
  RealMatrix block_overlap;  // |<L_a | r(s)>| per sample row, tracked labels
  int ground_multiplicity = 1;
  int tracking_warnings = 0;
  double min_tracking_overlap = 1.0;
};
Observables compute_observables(const Trajectory& traj);

// CSV layout: s, P_minus, fidelity, jb_overlap_0 .. jb_overlap_{D^2-1},
// trace_error, min_eig; fixed %.12e formatting so identical runs produce
// identical bytes.
void write_csv(std::ostream& os, const Observables& obs);

}  // namespace lindcd::evo
