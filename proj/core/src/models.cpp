#include "lindcd/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <atomic>
#include <mutex>
#include <thread>
#include <stdexcept>
#include <tuple>

#include "lindcd/num/quadrature.hpp"

namespace lindcd::models {

namespace {

constexpr double kBohrGroupTol = 1e-9;  // rad/ns

void check_unit_interval(double s, const char* fn) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::domain_error(std::string(fn) + ": schedule parameter outside [0, 1]");
}

void check_bath(const BathSpec& bath, const char* fn) {
  if (!(bath.eta_g2 >= 0.0) || !std::isfinite(bath.eta_g2))
    throw std::invalid_argument(std::string(fn) + ": coupling eta_g2 must be finite and nonnegative");
  if (!(bath.beta > 0.0) || !std::isfinite(bath.beta))
    throw std::invalid_argument(std::string(fn) + ": inverse temperature must be positive");
  if (!(bath.omega_c > 0.0) || !std::isfinite(bath.omega_c))
    throw std::invalid_argument(std::string(fn) + ": cutoff frequency must be positive");
}

// Largest eigenvalue spread of H(s) over a coarse schedule scan, used to
// size the Lamb-shift table so every Bohr frequency falls inside it.
double bohr_range(const AnnealingScenario& sc) {
  double spread = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(sc.hamiltonian(k / 100.0),
                                                   Eigen::EigenvaluesOnly);
    spread = std::max(spread,
                      es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff());
  }
  return spread;
}

void attach_bath(AnnealingScenario& sc) {
  if (!sc.bath)
    return;
  check_bath(*sc.bath, "make_scenario");
  if (sc.bath->lamb_shift && sc.bath->eta_g2 > 0.0) {
    const double w = std::max(8.0, std::ceil(1.05 * bohr_range(sc) + 1.0));
    sc.zeta_table = lamb_shift_table(sc.bath->beta, sc.bath->omega_c, w);
  }
}

}  // namespace

double schedule_q(double s) {
  check_unit_interval(s, "schedule_q");
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double schedule_dq(double s) {
  check_unit_interval(s, "schedule_dq");
  const double u = s * (1.0 - s);
  return 30.0 * u * u;
}

Matrix hamiltonian_qubit(const QubitModel& m, double s) {
  const double q = schedule_q(s);
  Matrix h(2, 2);
  const double x = -(1.0 - q) * m.omega_x / 2.0;
  const double z = -q * m.omega_z / 2.0;
  h << z, x, x, -z;
  return h;
}

SpinOps collective_spin_ops(int n) {
  if (n < 1)
    throw std::invalid_argument("collective_spin_ops: need at least one spin");
  const int d = n + 1;
  const double spin = n / 2.0;
  SpinOps ops;
  ops.sx = Matrix::Zero(d, d);
  ops.sy = Matrix::Zero(d, d);
  ops.sz = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = spin - k;  // descending magnetization
    ops.sz(k, k) = m;
    if (k > 0) {
      // <S, m+1 | S_+ | S, m>
      const double c = 0.5 * std::sqrt(spin * (spin + 1.0) - m * (m + 1.0));
      ops.sx(k - 1, k) = c;
      ops.sx(k, k - 1) = c;
      ops.sy(k - 1, k) = Complex(0.0, -c);
      ops.sy(k, k - 1) = Complex(0.0, c);
    }
  }
  return ops;
}

Matrix hamiltonian_pspin(const PSpinModel& m, double s) {
  if (m.n < 1 || m.p < 1)
    throw std::invalid_argument("hamiltonian_pspin: n and p must be positive");
  const double q = schedule_q(s);
  const SpinOps ops = collective_spin_ops(m.n);
  const Matrix two_sz = 2.0 * ops.sz;
  Matrix zp = Matrix::Identity(m.n + 1, m.n + 1);
  for (int k = 0; k < m.p; ++k)
    zp = zp * two_sz;
  return -2.0 * m.gamma * (1.0 - q) * ops.sx -
         (m.j * q / std::pow(static_cast<double>(m.n), m.p - 1)) * zp;
}

double gamma_spectral(double omega, const BathSpec& bath) {
  check_bath(bath, "gamma_spectral");
  if (!std::isfinite(omega))
    throw std::invalid_argument("gamma_spectral: frequency must be finite");
  const double x = bath.beta * omega;
  double base;
  if (std::abs(x) < 1e-6) {
    base = (1.0 + x / 2.0 + x * x / 12.0) / bath.beta;
  } else if (x > 0.0) {
    base = omega / (1.0 - std::exp(-x));
  } else {
    const double ex = std::exp(x);
    base = -omega * ex / (1.0 - ex);
  }
  return 2.0 * kPi * bath.eta_g2 * std::exp(-std::abs(omega) / bath.omega_c) * base;
}

namespace {

// Shared worker for the principal-value transform; the exponential cutoff
// makes the integrand negligible beyond ~24 cutoff widths (e^-24 relative).
double zeta_quad(double omega, const BathSpec& bath, double rel_tol) {
  const double span = 24.0 * bath.omega_c + 2.0 * std::abs(omega);
  const auto g = [&](double w) { return gamma_spectral(w, bath); };
  num::QuadratureOptions opt;
  opt.rel_tol = rel_tol;
  return num::principal_value(g, -span, span, omega, 0.5, opt) / (2.0 * kPi);
}

}  // namespace

double lamb_shift_zeta(double omega, const BathSpec& bath) {
  check_bath(bath, "lamb_shift_zeta");
  if (!std::isfinite(omega))
    throw std::invalid_argument("lamb_shift_zeta: frequency must be finite");
  if (bath.eta_g2 == 0.0)
    return 0.0;
  return zeta_quad(omega, bath, 1e-9);
}

LambShiftTable::LambShiftTable(double beta, double omega_c, double w_max,
                               int nodes) {
  if (nodes < 4 || !(w_max > 0.0))
    throw std::invalid_argument("LambShiftTable: bad grid");
  BathSpec unit;
  unit.eta_g2 = 1.0;
  unit.beta = beta;
  unit.omega_c = omega_c;
  w_max_ = w_max;
  dw_ = 2.0 * w_max / (nodes - 1);
  val_.resize(nodes);
  // Each node is an independent principal-value quadrature; farm them out.
  const unsigned workers =
      std::clamp(std::thread::hardware_concurrency(), 1u, 16u);
  std::vector<std::thread> pool;
  std::atomic<int> cursor{0};
  // The interpolation error dominates the node accuracy, so the per-node
  // quadrature can run two decades looser than the direct evaluation.
  const auto drain = [&] {
    for (int i; (i = cursor.fetch_add(1)) < nodes;)
      val_[static_cast<std::size_t>(i)] = zeta_quad(-w_max + i * dw_, unit, 3e-8);
  };
  for (unsigned t = 1; t < workers; ++t)
    pool.emplace_back(drain);
  drain();
  for (std::thread& t : pool)
    t.join();
  // Catmull-Rom slopes; one-sided at the ends.
  der_.resize(nodes);
  der_[0] = (val_[1] - val_[0]) / dw_;
  der_[nodes - 1] = (val_[nodes - 1] - val_[nodes - 2]) / dw_;
  for (int i = 1; i + 1 < nodes; ++i)
    der_[i] = (val_[i + 1] - val_[i - 1]) / (2.0 * dw_);
}

double LambShiftTable::unit_eval(double omega) const {
  if (std::abs(omega) > w_max_)
    throw std::out_of_range("LambShiftTable: frequency outside tabulated range");
  const double t0 = (omega + w_max_) / dw_;
  const int i = std::min(static_cast<int>(t0), static_cast<int>(val_.size()) - 2);
  const double t = t0 - i;
  const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
  const double h10 = t * (1.0 - t) * (1.0 - t);
  const double h01 = t * t * (3.0 - 2.0 * t);
  const double h11 = t * t * (t - 1.0);
  return h00 * val_[i] + h10 * dw_ * der_[i] + h01 * val_[i + 1] +
         h11 * dw_ * der_[i + 1];
}

std::shared_ptr<const LambShiftTable> lamb_shift_table(double beta,
                                                       double omega_c,
                                                       double w_max) {
  static std::mutex mu;
  static std::map<std::tuple<double, double, double>,
                  std::shared_ptr<const LambShiftTable>>
      cache;
  std::scoped_lock lock(mu);
  auto& entry = cache[{beta, omega_c, w_max}];
  if (!entry)
    entry = std::make_shared<const LambShiftTable>(beta, omega_c, w_max);
  return entry;
}

Matrix AnnealingScenario::hamiltonian(double s) const {
  return std::visit(
      [&](const auto& m) -> Matrix {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, QubitModel>)
          return hamiltonian_qubit(m, s);
        else
          return hamiltonian_pspin(m, s);
      },
      model);
}

AnnealingScenario make_qubit_scenario(const QubitModel& m,
                                      std::optional<BathSpec> bath) {
  AnnealingScenario sc;
  sc.model = m;
  sc.bath = std::move(bath);
  sc.basis = ops::make_basis(2);
  sc.coupling = Matrix::Zero(2, 2);
  sc.coupling(0, 0) = 1.0;
  sc.coupling(1, 1) = -1.0;
  attach_bath(sc);
  return sc;
}

AnnealingScenario make_pspin_scenario(const PSpinModel& m,
                                      std::optional<BathSpec> bath) {
  AnnealingScenario sc;
  sc.model = m;
  sc.bath = std::move(bath);
  sc.basis = ops::make_basis(m.n + 1);
  sc.coupling = collective_spin_ops(m.n).sz;
  attach_bath(sc);
  return sc;
}

ops::Superoperator ame_superop(const AnnealingScenario& sc, double s,
                               AmeDiagnostics* diag) {
  if (!sc.bath)
    throw std::invalid_argument("ame_superop: scenario has no bath");
  check_bath(*sc.bath, "ame_superop");
  const Matrix h = sc.hamiltonian(s);
  if (sc.bath->eta_g2 == 0.0)
    return ops::unitary_superop(h, sc.basis);

  const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("ame_superop: eigensolver failed");
  const RealVector eps = es.eigenvalues();
  const Matrix p = es.eigenvectors();
  const Matrix u_eig = p.adjoint() * sc.coupling * p;
  const int d = sc.dim();

  // Bohr frequencies omega = eps_b - eps_a; entry (a, b) of the jump
  // operator in the eigenbasis, so positive omega moves population downward.
  struct Pair {
    double omega;
    int a, b;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(d) * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      pairs.push_back({eps(b) - eps(a), a, b});
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& x, const Pair& y) { return x.omega < y.omega; });

  std::vector<Matrix> jump_ops;
  std::vector<double> rates;
  Matrix h_ls = Matrix::Zero(d, d);
  double prev_center = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  int bins = 0;

  std::size_t i = 0;
  while (i < pairs.size()) {
    std::size_t j = i + 1;
    double sum = pairs[i].omega;
    while (j < pairs.size() && pairs[j].omega - pairs[j - 1].omega <= kBohrGroupTol) {
      sum += pairs[j].omega;
      ++j;
    }
    const double center = sum / static_cast<double>(j - i);
    Matrix a_op = Matrix::Zero(d, d);
    for (std::size_t k = i; k < j; ++k)
      a_op(pairs[k].a, pairs[k].b) = u_eig(pairs[k].a, pairs[k].b);

    if (a_op.norm() > 1e-14 * std::max(1.0, sc.coupling.norm())) {
      const Matrix a_lab = p * a_op * p.adjoint();
      jump_ops.push_back(a_lab);
      rates.push_back(gamma_spectral(center, *sc.bath));
      if (sc.bath->lamb_shift) {
        const double zeta = sc.zeta_table && std::abs(center) <= sc.zeta_table->w_max()
                                ? sc.bath->eta_g2 * sc.zeta_table->unit_eval(center)
                                : lamb_shift_zeta(center, *sc.bath);
        h_ls += zeta * (a_lab.adjoint() * a_lab);
      }
      if (bins > 0)
        min_gap = std::min(min_gap, center - prev_center);
      prev_center = center;
      ++bins;
    }
    i = j;
  }

  if (diag) {
    diag->bins = bins;
    diag->min_bin_gap = (bins > 1) ? min_gap : 0.0;
    diag->grouping_ambiguous = (bins > 1) && (min_gap < 10.0 * kBohrGroupTol);
  }

  ops::Superoperator out = ops::unitary_superop(h + h_ls, sc.basis);
  out.M += ops::dissipator_superop(jump_ops, rates, sc.basis).M;
  return out;
}

ops::Superoperator lindbladian(const AnnealingScenario& sc, double s) {
  if (sc.bath)
    return ame_superop(sc, s);
  return ops::unitary_superop(sc.hamiltonian(s), sc.basis);
}

Matrix thermal_state(const Matrix& h, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("thermal_state: inverse temperature must be positive");
  if (ops::hermiticity_defect(h) > 1e-10)
    throw std::invalid_argument("thermal_state: hamiltonian is not hermitian");
  const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector eps = es.eigenvalues();
  RealVector w = (-beta * (eps.array() - eps.minCoeff())).exp();
  w /= w.sum();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace lindcd::models
