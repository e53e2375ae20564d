#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "lindcd/superop.hpp"
#include "lindcd/types.hpp"

namespace lindcd::models {

// Interpolation schedule q(s) = 6s^5 - 15s^4 + 10s^3 and its derivative.
// Flat endpoints: q(0) = q'(0) = 0, q(1) = 1, q'(1) = 0.
double schedule_q(double s);
double schedule_dq(double s);

struct QubitModel {
  double omega_x = 1.0;  // rad/ns
  double omega_z = 1.0;  // rad/ns
};

// Ferromagnetic p-spin model in the maximal-spin sector, dimension n + 1.
struct PSpinModel {
  int n = 3;
  int p = 3;
  double gamma = 1.0;  // transverse field strength, rad/ns
  double j = 1.0;      // ferromagnetic coupling, rad/ns
};

// Ohmic bath with exponential cutoff at inverse temperature beta.
struct BathSpec {
  double eta_g2 = 1e-4;          // dimensionless system-bath coupling
  double beta = 1.0 / 2.23;      // ns (17 mK)
  double omega_c = 8.0 * kPi;    // rad/ns
  bool lamb_shift = true;
};

Matrix hamiltonian_qubit(const QubitModel& m, double s);

// Collective spin operators for n spins-1/2 in the symmetric sector,
// S = n/2, basis ordered by descending magnetization.
struct SpinOps {
  Matrix sx, sy, sz;
};
SpinOps collective_spin_ops(int n);

Matrix hamiltonian_pspin(const PSpinModel& m, double s);

// Bath spectral density gamma(omega) >= 0; satisfies the detailed-balance
// relation gamma(-omega) = exp(-beta omega) gamma(omega) exactly, with the
// omega -> 0 limit 2 pi eta_g2 / beta taken by series expansion.
double gamma_spectral(double omega, const BathSpec& bath);

// Lamb-shift spectral function, the Cauchy principal value
// P.V. integral gamma(omega') / (omega - omega') d omega' / (2 pi).
double lamb_shift_zeta(double omega, const BathSpec& bath);

// Precomputed cubic interpolant of lamb_shift_zeta at unit coupling over
// [-w_max, w_max]; the zeta value scales linearly in eta_g2, so one table per
// (beta, omega_c) serves every coupling strength. Tables are memoized
// process-wide because construction performs a few thousand quadratures.
class LambShiftTable {
 public:
  LambShiftTable(double beta, double omega_c, double w_max, int nodes = 513);
  double unit_eval(double omega) const;  // zeta at eta_g2 = 1
  double w_max() const { return w_max_; }

 private:
  double w_max_, dw_;
  std::vector<double> val_, der_;
};

std::shared_ptr<const LambShiftTable> lamb_shift_table(double beta,
                                                       double omega_c,
                                                       double w_max);

struct AnnealingScenario {
  std::variant<QubitModel, PSpinModel> model;
  std::optional<BathSpec> bath;
  Matrix coupling;  // Hermitian system operator entering the bath coupling
  ops::BasisPtr basis;
  std::shared_ptr<const LambShiftTable> zeta_table;

  int dim() const { return basis ? basis->dim : 0; }
  Matrix hamiltonian(double s) const;
};

AnnealingScenario make_qubit_scenario(const QubitModel& m,
                                      std::optional<BathSpec> bath);
AnnealingScenario make_pspin_scenario(const PSpinModel& m,
                                      std::optional<BathSpec> bath);

struct AmeDiagnostics {
  int bins = 0;                    // distinct Bohr-frequency groups
  double min_bin_gap = 0.0;        // smallest gap between group centers
  bool grouping_ambiguous = false; // some gap within 10x of the merge tolerance
};

// Adiabatic master equation generator at schedule point s: Davies generator
// in the instantaneous eigenbasis with Lamb-shift correction. Jump operators
// A(omega) collect U matrix elements between eigenstates separated by
// omega = eps_b - eps_a (positive omega lowers energy), grouped with absolute
// tolerance 1e-9 rad/ns; A(-omega) = A(omega)^dag by construction. A zero
// coupling strength short-circuits to the bare unitary generator.
ops::Superoperator ame_superop(const AnnealingScenario& sc, double s,
                               AmeDiagnostics* diag = nullptr);

// Generator dispatch: ame_superop when a bath is attached, else -i[H, .].
ops::Superoperator lindbladian(const AnnealingScenario& sc, double s);

// Gibbs state exp(-beta h) / Z, evaluated through the eigendecomposition
// with the spectrum shifted so the exponentials cannot overflow.
Matrix thermal_state(const Matrix& h, double beta);

}  // namespace lindcd::models
