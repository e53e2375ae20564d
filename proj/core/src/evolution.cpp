#include "lindcd/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>

#include "lindcd/num/rk45.hpp"
#include "lindcd/spectral.hpp"

namespace lindcd::evo {

namespace {

// Uniform-grid linear interpolant of the generator supermatrix.
class GeneratorTable {
 public:
  GeneratorTable(const models::AnnealingScenario& sc, int nodes) {
    nodes_.reserve(static_cast<std::size_t>(nodes));
    for (int k = 0; k < nodes; ++k)
      nodes_.push_back(models::lindbladian(sc, static_cast<double>(k) / (nodes - 1)).M);
  }

  Matrix at(double s) const {
    const double pos = std::clamp(s, 0.0, 1.0) * static_cast<double>(nodes_.size() - 1);
    const std::size_t k = std::min(static_cast<std::size_t>(pos), nodes_.size() - 2);
    const double t = pos - static_cast<double>(k);
    return (1.0 - t) * nodes_[k] + t * nodes_[k + 1];
  }

 private:
  std::vector<Matrix> nodes_;
};

Matrix hermitized(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

RealVector clipped_spectrum(const Matrix& hermitian_state, Matrix* vecs = nullptr) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_state);
  RealVector vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    vals(i) = std::max(vals(i), 0.0);
  if (vecs)
    *vecs = es.eigenvectors();
  return vals;
}

}  // namespace

ops::CoherenceVector initial_state(const models::AnnealingScenario& sc,
                                   InitialState kind) {
  const Matrix h0 = sc.hamiltonian(0.0);
  Matrix rho;
  if (kind == InitialState::Thermal) {
    if (!sc.bath)
      throw std::invalid_argument("initial_state: thermal start requires a bath");
    rho = models::thermal_state(h0, sc.bath->beta);
  } else {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(h0);
    const Vector g = es.eigenvectors().col(0);
    rho = g * g.adjoint();
  }
  return ops::vectorize(rho, sc.basis);
}

Trajectory evolve(const models::AnnealingScenario& sc,
                  const cd::GaugeProvider& gauge, double tau,
                  const IntegratorConfig& cfg, InitialState start) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("evolve: annealing time must be positive");
  if (cfg.samples < 2)
    throw std::invalid_argument("evolve: need at least two sample points");
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
    throw std::invalid_argument("evolve: tolerances must be positive");

  const bool exact_gen =
      cfg.generator_eval == "exact" ||
      (cfg.generator_eval == "auto" && sc.dim() <= 2);
  if (!exact_gen && cfg.generator_eval != "grid" && cfg.generator_eval != "auto")
    throw std::invalid_argument("evolve: unknown generator_eval policy '" +
                                cfg.generator_eval + "'");
  std::unique_ptr<GeneratorTable> table;
  if (!exact_gen)
    table = std::make_unique<GeneratorTable>(
        sc, std::max(cfg.generator_grid_points, 2));

  const bool driven = gauge.mode() != cd::GaugeProvider::Mode::None;
  const auto rhs = [&](double s, const Vector& y, Vector& dy) {
    Matrix m = tau * (exact_gen ? models::lindbladian(sc, s).M : table->at(s));
    if (driven)
      m += gauge.gauge(s);
    dy.noalias() = m * y;
  };

  Trajectory traj;
  traj.scenario = sc;
  traj.tau = tau;
  traj.s.reserve(static_cast<std::size_t>(cfg.samples));
  traj.states.reserve(static_cast<std::size_t>(cfg.samples));

  ops::CoherenceVector state = initial_state(sc, start);
  traj.s.push_back(0.0);
  traj.states.push_back(state);

  num::StepControl ctl;
  ctl.rel_tol = cfg.rel_tol;
  ctl.abs_tol = cfg.abs_tol;
  ctl.max_step = cfg.max_step;

  const double drift_band = 100.0 * cfg.rel_tol;
  double h_carry = 0.0;
  for (int k = 1; k < cfg.samples; ++k) {
    const double s0 = static_cast<double>(k - 1) / (cfg.samples - 1);
    const double s1 = static_cast<double>(k) / (cfg.samples - 1);
    try {
      const num::StepStats stats =
          num::integrate_to(rhs, s0, s1, state.r, ctl, &h_carry);
      traj.steps_accepted += stats.accepted;
      traj.steps_rejected += stats.rejected;
      traj.rhs_evaluations += stats.evals;
    } catch (const num::StepperError& e) {
      throw StiffFailure(std::string("evolve: ") + e.what() +
                         "; the generator is too stiff at this tolerance, reduce "
                         "the coupling or relax rel_tol/abs_tol");
    }
    const double drift = std::abs(static_cast<double>(sc.dim()) * state.r(0) - 1.0);
    traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
    if (drift > drift_band)
      throw IntegrationInvalid("evolve: trace drift " + std::to_string(drift) +
                               " at s = " + std::to_string(s1) +
                               " exceeds 100x the relative tolerance");
    traj.s.push_back(s1);
    traj.states.push_back(state);
  }
  return traj;
}

double ground_state_probability(const Matrix& rho, const Matrix& h,
                                double degeneracy_tol, int* multiplicity) {
  if (rho.rows() != h.rows() || rho.cols() != h.cols())
    throw std::invalid_argument("ground_state_probability: dimension mismatch");
  const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector eps = es.eigenvalues();
  const double spread = eps(eps.size() - 1) - eps(0);
  const double tol = degeneracy_tol * std::max(1.0, spread);
  int mult = 1;
  while (mult < eps.size() && eps(mult) - eps(0) <= tol)
    ++mult;
  if (multiplicity)
    *multiplicity = mult;
  double p = 0.0;
  for (int i = 0; i < mult; ++i) {
    const Vector v = es.eigenvectors().col(i);
    p += std::real((v.adjoint() * rho * v)(0, 0));
  }
  return p;
}

double uhlmann_fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("uhlmann_fidelity: dimension mismatch");
  for (const Matrix* m : {&rho, &sigma}) {
    if (ops::hermiticity_defect(*m) > 1e-8)
      throw InvalidState("uhlmann_fidelity: input is not hermitian");
    const double tr_err = std::abs((*m).trace() - Complex(1.0));
    if (tr_err > 1e-6)
      throw InvalidState("uhlmann_fidelity: trace deviates from one by " +
                         std::to_string(tr_err));
  }
  Matrix v;
  const RealVector w = clipped_spectrum(hermitized(rho), &v);
  const Matrix sqrt_rho = v * w.cwiseSqrt().asDiagonal() * v.adjoint();
  const Matrix inner = hermitized(sqrt_rho * hermitized(sigma) * sqrt_rho);
  const RealVector m = clipped_spectrum(inner);
  const double root_sum = m.cwiseSqrt().sum();
  return root_sum * root_sum;
}

CptpDiagnostics cptp_diagnostics(const ops::CoherenceVector& v) {
  const Matrix rho = ops::devectorize(v);
  CptpDiagnostics d;
  d.trace_error = std::abs(rho.trace() - Complex(1.0));
  d.hermiticity = ops::hermiticity_defect(rho);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(hermitized(rho),
                                                 Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

Observables compute_observables(const Trajectory& traj) {
  const models::AnnealingScenario& sc = traj.scenario;
  const Eigen::Index n_samples = static_cast<Eigen::Index>(traj.s.size());
  const Eigen::Index n_blocks = sc.basis->size();

  Observables obs;
  obs.s = traj.s;
  obs.p_minus.resize(n_samples);
  obs.fidelity.resize(n_samples);
  obs.trace_error.resize(n_samples);
  obs.min_eig.resize(n_samples);
  obs.block_overlap.resize(n_samples, n_blocks);

  const spectral::SpectrumTrack track = spectral::track_over_grid(
      [&](double s) { return models::lindbladian(sc, s); }, traj.s);
  obs.tracking_warnings = track.warnings;
  obs.min_tracking_overlap = track.min_overlap;

  for (Eigen::Index k = 0; k < n_samples; ++k) {
    const double s = traj.s[static_cast<std::size_t>(k)];
    const ops::CoherenceVector& state = traj.states[static_cast<std::size_t>(k)];
    const Matrix h = sc.hamiltonian(s);
    const Matrix rho = hermitized(ops::devectorize(state));

    int mult = 1;
    obs.p_minus(k) = ground_state_probability(rho, h, 1e-9, &mult);
    obs.ground_multiplicity = std::max(obs.ground_multiplicity, mult);

    Matrix target;
    if (sc.bath) {
      target = models::thermal_state(h, sc.bath->beta);
    } else {
      const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      const RealVector eps = es.eigenvalues();
      const double tol = 1e-9 * std::max(1.0, eps(eps.size() - 1) - eps(0));
      int gmult = 1;
      while (gmult < eps.size() && eps(gmult) - eps(0) <= tol)
        ++gmult;
      target = Matrix::Zero(h.rows(), h.cols());
      for (int i = 0; i < gmult; ++i)
        target += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
      target /= static_cast<double>(gmult);
    }
    // Renormalize the trace before the fidelity so its 1e-6 gate reflects
    // state validity, which the trajectory check already enforced.
    obs.fidelity(k) = uhlmann_fidelity(rho / rho.trace().real(), target);

    const CptpDiagnostics diag = cptp_diagnostics(state);
    obs.trace_error(k) = diag.trace_error;
    obs.min_eig(k) = diag.min_eigenvalue;

    obs.block_overlap.row(k) =
        spectral::block_overlaps(track.spectra[static_cast<std::size_t>(k)], state)
            .transpose();
  }
  return obs;
}

void write_csv(std::ostream& os, const Observables& obs) {
  const Eigen::Index n_blocks = obs.block_overlap.cols();
  os << "s,P_minus,fidelity";
  for (Eigen::Index b = 0; b < n_blocks; ++b)
    os << ",jb_overlap_" << b;
  os << ",trace_error,min_eig\n";

  char buf[32];
  const auto put = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.12e", x);
    os << buf;
  };
  for (std::size_t k = 0; k < obs.s.size(); ++k) {
    const Eigen::Index i = static_cast<Eigen::Index>(k);
    put(obs.s[k]);
    os << ',';
    put(obs.p_minus(i));
    os << ',';
    put(obs.fidelity(i));
    for (Eigen::Index b = 0; b < n_blocks; ++b) {
      os << ',';
      put(obs.block_overlap(i, b));
    }
    os << ',';
    put(obs.trace_error(i));
    os << ',';
    put(obs.min_eig(i));
    os << '\n';
  }
}

}  // namespace lindcd::evo
