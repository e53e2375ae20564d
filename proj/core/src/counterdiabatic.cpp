#include "lindcd/counterdiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lindcd/num/nnls.hpp"

namespace lindcd::cd {

namespace {

Matrix central_difference(const GeneratorFn& gen_at, double s, double h) {
  if (s - h < 0.0) {
    return (-3.0 * gen_at(s).M + 4.0 * gen_at(s + h).M - gen_at(s + 2.0 * h).M) /
           (2.0 * h);
  }
  if (s + h > 1.0) {
    return (3.0 * gen_at(s).M - 4.0 * gen_at(s - h).M + gen_at(s - 2.0 * h).M) /
           (2.0 * h);
  }
  return (gen_at(s + h).M - gen_at(s - h).M) / (2.0 * h);
}

RealVector flatten_reim(const Matrix& m) {
  const Eigen::Index n = m.size();
  RealVector out(2 * n);
  const auto flat = Eigen::Map<const Vector>(m.data(), n);
  out.head(n) = flat.real();
  out.tail(n) = flat.imag();
  return out;
}

LsqSystem assemble_from_superops(const Matrix& gen, const Matrix& dgen,
                                 const std::vector<Matrix>& term_ops,
                                 const std::vector<bool>& nonneg) {
  LsqSystem sys;
  sys.nonneg = nonneg;
  sys.target = flatten_reim(ops::comm(dgen, gen));
  sys.columns.resize(sys.target.size(), static_cast<Eigen::Index>(term_ops.size()));
  for (std::size_t i = 0; i < term_ops.size(); ++i) {
    const Matrix bb = ops::comm(ops::comm(term_ops[i], gen), gen);
    sys.columns.col(static_cast<Eigen::Index>(i)) = flatten_reim(bb);
  }
  return sys;
}

}  // namespace

DerivativeResult generator_derivative(const GeneratorFn& gen_at, double s,
                                      double step, double reliable_tol) {
  if (!(step > 0.0))
    throw std::invalid_argument("generator_derivative: step must be positive");
  const ops::Superoperator probe = gen_at(s);
  const Matrix coarse = central_difference(gen_at, s, step);
  const Matrix fine = central_difference(gen_at, s, step / 2.0);

  DerivativeResult out;
  out.value.basis = probe.basis;
  out.value.M = fine;
  out.richardson_error = (coarse - fine).norm() / std::max(1.0, fine.norm());
  out.reliable = out.richardson_error <= reliable_tol;
  return out;
}

ExactGauge exact_gauge(const spectral::JordanSpectrum& sp,
                       const ops::Superoperator& dgen,
                       double degeneracy_tol) {
  if (!sp.diagonalizable)
    throw std::invalid_argument(
        "exact_gauge: generator spectrum is not diagonalizable within tolerance");
  if (sp.size() != dgen.M.rows())
    throw std::invalid_argument("exact_gauge: dimension mismatch");

  const Eigen::Index n = sp.size();
  const Matrix t = sp.left * dgen.M * sp.right;
  const double scale = std::max(sp.eigenvalues.cwiseAbs().maxCoeff(), 1e-300);
  const double tol = degeneracy_tol * scale;

  ExactGauge out;
  Matrix aj = Matrix::Zero(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a < n; ++a) {
      if (a == b)
        continue;
      const Complex gap = sp.eigenvalues(a) - sp.eigenvalues(b);
      if (std::abs(gap) > tol)
        aj(b, a) = t(b, a) / gap;
      else
        ++out.skipped_pairs;
    }
  }
  out.gauge.basis = sp.basis;
  out.gauge.M = sp.right * aj * sp.left;
  return out;
}

AnsatzTerm unitary_term(Matrix op, std::string name) {
  if (op.rows() != op.cols() || op.rows() == 0)
    throw std::invalid_argument("unitary_term: operator must be square");
  if (ops::hermiticity_defect(op) > 1e-10)
    throw std::invalid_argument("unitary_term: operator must be hermitian");
  return {AnsatzTerm::Kind::Unitary, std::move(op), std::move(name)};
}

AnsatzTerm dissipative_term(Matrix op, std::string name) {
  if (op.rows() != op.cols() || op.rows() == 0)
    throw std::invalid_argument("dissipative_term: operator must be square");
  return {AnsatzTerm::Kind::Dissipative, std::move(op), std::move(name)};
}

ops::Superoperator ansatz_superop(const AnsatzTerm& term, ops::BasisPtr basis) {
  if (!basis)
    throw std::invalid_argument("ansatz_superop: null basis");
  if (term.kind == AnsatzTerm::Kind::Unitary)
    return ops::unitary_superop(term.op, basis);
  return ops::dissipator_superop({term.op}, {1.0}, basis);
}

std::vector<AnsatzTerm> named_ansatz(const std::string& name,
                                     const models::AnnealingScenario& sc) {
  const int d = sc.dim();
  Matrix sy;
  if (d == 2) {
    sy = Matrix::Zero(2, 2);
    sy(0, 1) = Complex(0.0, -1.0);
    sy(1, 0) = Complex(0.0, 1.0);
  } else {
    sy = models::collective_spin_ops(d - 1).sy;
  }

  std::vector<AnsatzTerm> terms;
  if (name == "Sy") {
    terms.push_back(unitary_term(sy, "Sy"));
    return terms;
  }
  if (name == "Sy3") {
    terms.push_back(unitary_term(sy, "Sy"));
    terms.push_back(unitary_term(sy * sy * sy, "Sy3"));
    return terms;
  }
  if (name == "SxSySz_cyclic") {
    const models::SpinOps spin = models::collective_spin_ops(d - 1);
    const Matrix xyz = spin.sx * spin.sy * spin.sz;
    terms.push_back(unitary_term(sy, "Sy"));
    terms.push_back(unitary_term(sy * sy * sy, "Sy3"));
    terms.push_back(unitary_term(xyz + xyz.adjoint(), "SxSySz"));
    return terms;
  }
  if (name == "basis_dissipators") {
    for (Eigen::Index k = 1; k < sc.basis->size(); ++k) {
      terms.push_back(dissipative_term(
          sc.basis->elements[static_cast<std::size_t>(k)],
          "basis_" + std::to_string(k)));
    }
    return terms;
  }
  throw std::invalid_argument("named_ansatz: unknown ansatz '" + name + "'");
}

const std::vector<std::string>& ansatz_names() {
  static const std::vector<std::string> names = {"Sy", "Sy3", "SxSySz_cyclic",
                                                 "basis_dissipators"};
  return names;
}

LsqSystem assemble_lsq(const ops::Superoperator& gen,
                       const ops::Superoperator& dgen,
                       const std::vector<AnsatzTerm>& terms,
                       ops::BasisPtr basis) {
  if (terms.empty())
    throw std::invalid_argument("assemble_lsq: empty ansatz");
  std::vector<Matrix> term_ops;
  std::vector<bool> nonneg;
  term_ops.reserve(terms.size());
  for (const AnsatzTerm& t : terms) {
    term_ops.push_back(ansatz_superop(t, basis).M);
    nonneg.push_back(t.kind == AnsatzTerm::Kind::Dissipative);
  }
  return assemble_from_superops(gen.M, dgen.M, term_ops, nonneg);
}

VariationalSolution solve_variational(const LsqSystem& sys) {
  const num::LsqResult lsq = num::nnls_mixed(sys.columns, sys.target, sys.nonneg);
  VariationalSolution out;
  out.coefficients = lsq.x;
  out.residual = lsq.residual_norm;
  out.residual_at_zero = sys.target.norm();
  out.active = lsq.active;
  out.rank_deficient = lsq.rank_deficient;
  return out;
}

double gauge_residual(const ops::Superoperator& gauge,
                      const ops::Superoperator& gen,
                      const ops::Superoperator& dgen) {
  const Matrix g = dgen.M - ops::comm(gauge.M, gen.M);
  return ops::comm(g, gen.M).norm();
}

double closed_system_gauge_qubit(double s, const models::QubitModel& m) {
  const double rel = std::abs(m.omega_x - m.omega_z) /
                     std::max({std::abs(m.omega_x), std::abs(m.omega_z), 1e-300});
  if (rel > 1e-12)
    throw std::invalid_argument(
        "closed_system_gauge_qubit: requires omega_x == omega_z");
  const double q = models::schedule_q(s);
  return -models::schedule_dq(s) / (1.0 - 2.0 * q + 2.0 * q * q);
}

GaugeProvider GaugeProvider::none() {
  GaugeProvider p;
  p.mode_ = Mode::None;
  return p;
}

GaugeProvider GaugeProvider::exact(const models::AnnealingScenario& sc,
                                   double fd_step, double degeneracy_tol) {
  GaugeProvider p;
  p.mode_ = Mode::Exact;
  p.scenario_ = sc;
  p.dim_ = sc.dim();
  p.fd_step_ = fd_step;
  p.degeneracy_tol_ = degeneracy_tol;
  return p;
}

GaugeProvider GaugeProvider::variational(const models::AnnealingScenario& sc,
                                         std::vector<AnsatzTerm> terms,
                                         int grid_points, double fd_step) {
  if (grid_points < 2)
    throw std::invalid_argument("GaugeProvider: need at least two grid points");
  if (terms.empty())
    throw std::invalid_argument("GaugeProvider: empty ansatz");

  GaugeProvider p;
  p.mode_ = Mode::Variational;
  p.scenario_ = sc;
  p.dim_ = sc.dim();
  p.fd_step_ = fd_step;
  p.terms_ = std::move(terms);

  std::vector<bool> nonneg;
  for (const AnsatzTerm& t : p.terms_) {
    p.term_superops_.push_back(ansatz_superop(t, sc.basis).M);
    nonneg.push_back(t.kind == AnsatzTerm::Kind::Dissipative);
  }

  const GeneratorFn gen_at = [&sc](double t) { return models::lindbladian(sc, t); };
  p.grid_.resize(static_cast<std::size_t>(grid_points));
  p.solutions_.reserve(p.grid_.size());
  for (int k = 0; k < grid_points; ++k) {
    const double s = static_cast<double>(k) / (grid_points - 1);
    p.grid_[static_cast<std::size_t>(k)] = s;
    const ops::Superoperator gen = gen_at(s);
    const DerivativeResult dgen = generator_derivative(gen_at, s, fd_step);
    const LsqSystem sys =
        assemble_from_superops(gen.M, dgen.value.M, p.term_superops_, nonneg);
    p.solutions_.push_back(solve_variational(sys));
  }
  return p;
}

Matrix GaugeProvider::gauge(double s) const {
  switch (mode_) {
    case Mode::None:
      return Matrix::Zero(dim_ * dim_, dim_ * dim_);
    case Mode::Exact: {
      const ops::Superoperator gen = models::lindbladian(scenario_, s);
      const spectral::JordanSpectrum sp = spectral::decompose(gen);
      const GeneratorFn gen_at = [this](double t) {
        return models::lindbladian(scenario_, t);
      };
      const DerivativeResult dgen = generator_derivative(gen_at, s, fd_step_);
      return exact_gauge(sp, dgen.value, degeneracy_tol_).gauge.M;
    }
    case Mode::Variational: {
      const double clamped = std::clamp(s, 0.0, 1.0);
      const auto n = grid_.size();
      const double pos = clamped * static_cast<double>(n - 1);
      const std::size_t k = std::min(static_cast<std::size_t>(pos), n - 2);
      const double t = pos - static_cast<double>(k);
      const RealVector& c0 = solutions_[k].coefficients;
      const RealVector& c1 = solutions_[k + 1].coefficients;
      Matrix out = Matrix::Zero(term_superops_[0].rows(), term_superops_[0].cols());
      for (std::size_t i = 0; i < term_superops_.size(); ++i) {
        const double c = (1.0 - t) * c0(static_cast<Eigen::Index>(i)) +
                         t * c1(static_cast<Eigen::Index>(i));
        out += c * term_superops_[i];
      }
      return out;
    }
  }
  throw std::logic_error("GaugeProvider: invalid mode");
}

ThermalInvarianceReport thermal_invariance_report(
    const models::AnnealingScenario& sc, const GaugeProvider& provider) {
  if (provider.mode() != GaugeProvider::Mode::Variational)
    throw std::invalid_argument(
        "thermal_invariance_report: requires a variational provider");
  if (!sc.bath)
    throw std::invalid_argument("thermal_invariance_report: scenario has no bath");

  std::vector<Matrix> diss_ops;
  std::vector<std::size_t> diss_idx;
  for (std::size_t i = 0; i < provider.terms().size(); ++i) {
    if (provider.terms()[i].kind == AnsatzTerm::Kind::Dissipative) {
      diss_ops.push_back(ansatz_superop(provider.terms()[i], sc.basis).M);
      diss_idx.push_back(i);
    }
  }

  ThermalInvarianceReport report;
  report.grid = provider.grid();
  report.residual.reserve(report.grid.size());
  for (std::size_t k = 0; k < report.grid.size(); ++k) {
    const double s = report.grid[k];
    Matrix channel;
    bool empty = true;
    for (std::size_t j = 0; j < diss_ops.size(); ++j) {
      const double c =
          provider.solutions()[k].coefficients(static_cast<Eigen::Index>(diss_idx[j]));
      if (empty) {
        channel = c * diss_ops[j];
        empty = false;
      } else {
        channel += c * diss_ops[j];
      }
    }
    const double cnorm = empty ? 0.0 : channel.norm();
    double res = 0.0;
    if (cnorm > 1e-14) {
      const Matrix gibbs = models::thermal_state(sc.hamiltonian(s), sc.bath->beta);
      const ops::CoherenceVector r = ops::vectorize(gibbs, sc.basis);
      res = (channel * r.r).norm() / cnorm;
    }
    report.residual.push_back(res);
    report.channel_norm.push_back(cnorm);
    report.max_residual = std::max(report.max_residual, res);
    report.max_channel_norm = std::max(report.max_channel_norm, cnorm);
  }
  return report;
}

}  // namespace lindcd::cd
