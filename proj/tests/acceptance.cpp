// Acceptance suite: one line of output per criterion, exit code = number of
// failed criteria. Each criterion runs the public library APIs end to end at
// desk scale (dimensions 2 and 4).
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lindcd/counterdiabatic.hpp"
#include "lindcd/evolution.hpp"
#include "lindcd/models.hpp"
#include "lindcd/spectral.hpp"
#include "lindcd/validation.hpp"

using namespace lindcd;

namespace {

int g_failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
  std::printf("[%s] %02d %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str());
  if (!ok)
    ++g_failures;
}

void run_criterion(int id, const std::string& what,
                   const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(id, what, ok, detail);
  } catch (const std::exception& e) {
    report(id, what, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

double last(const RealVector& v) { return v(v.size() - 1); }

// Peak overlap along the path of every block that starts unpopulated.
struct Leakage {
  int empty_blocks = 0;
  double peak = 0.0;
};
Leakage leakage_of(const evo::Observables& obs, double empty_tol = 1e-9) {
  Leakage out;
  for (Eigen::Index c = 0; c < obs.block_overlap.cols(); ++c) {
    if (obs.block_overlap(0, c) >= empty_tol)
      continue;
    ++out.empty_blocks;
    out.peak = std::max(out.peak, obs.block_overlap.col(c).maxCoeff());
  }
  return out;
}

evo::Observables anneal(const models::AnnealingScenario& sc,
                        const cd::GaugeProvider& gauge, double tau,
                        evo::InitialState start = evo::InitialState::Ground) {
  return evo::compute_observables(evo::evolve(sc, gauge, tau, {}, start));
}

models::BathSpec weak_bath(bool lamb_shift = true) {
  models::BathSpec bath;
  bath.lamb_shift = lamb_shift;
  return bath;
}

models::BathSpec strong_bath() {
  models::BathSpec bath;
  bath.eta_g2 = 1e-2;
  return bath;
}

}  // namespace

int main() {
  run_criterion(1, "qubit minimum gap", [] {
    const models::QubitModel m;
    double min_gap = 1e300, argmin = -1.0;
    for (int k = 0; k <= 2000; ++k) {
      const double s = k / 2000.0;
      Eigen::SelfAdjointEigenSolver<Matrix> es(models::hamiltonian_qubit(m, s));
      const double gap = es.eigenvalues()(1) - es.eigenvalues()(0);
      if (gap < min_gap) {
        min_gap = gap;
        argmin = s;
      }
    }
    const double want = 1.0 / std::sqrt(2.0);
    const bool ok = std::abs(min_gap - want) <= 1e-10 && argmin == 0.5;
    return std::make_pair(ok, "min gap " + fmt(min_gap) + " at s=" +
                                  fmt(argmin) + ", target 1/sqrt(2)");
  });

  run_criterion(2, "temperature unit conversion", [] {
    const double k_b = 1.380649e-23;        // J/K
    const double hbar = 1.054571817e-34;    // J s
    const double omega = k_b * 17e-3 / hbar * 1e-9;  // rad/ns
    const double default_temp = 1.0 / models::BathSpec{}.beta;
    const bool ok = std::abs(omega / 2.23 - 1.0) < 0.01;
    return std::make_pair(ok, "computed " + fmt(omega) +
                                  " rad/ns vs 2.23 (library default " +
                                  fmt(default_temp) + ")");
  });

  run_criterion(3, "closed-system final population", [] {
    const auto sc = models::make_qubit_scenario({}, std::nullopt);
    const double p10 = last(anneal(sc, cd::GaugeProvider::none(), 10.0).p_minus);
    const double p100 =
        last(anneal(sc, cd::GaugeProvider::none(), 100.0).p_minus);
    const bool ok = std::abs(p10 - 0.91) <= 0.03 && p100 >= 0.99;
    return std::make_pair(ok, "tau=10: " + fmt(p10) + " (0.91 +- 0.03), "
                                  "tau=100: " + fmt(p100) + " (>= 0.99)");
  });

  run_criterion(4, "open-system final population", [] {
    const auto with_ls = models::make_qubit_scenario({}, weak_bath(true));
    const auto no_ls = models::make_qubit_scenario({}, weak_bath(false));
    const double on10 =
        last(anneal(with_ls, cd::GaugeProvider::none(), 10.0).p_minus);
    const double on100 =
        last(anneal(with_ls, cd::GaugeProvider::none(), 100.0).p_minus);
    const double off10 =
        last(anneal(no_ls, cd::GaugeProvider::none(), 10.0).p_minus);
    const double off100 =
        last(anneal(no_ls, cd::GaugeProvider::none(), 100.0).p_minus);
    const bool ok = std::abs(on10 - 0.90) <= 0.03 && std::abs(on100 - 0.95) <= 0.03;
    return std::make_pair(
        ok, "lamb shift on: tau=10 " + fmt(on10) + " (0.90 +- 0.03), tau=100 " +
                fmt(on100) + " (0.95 +- 0.03); off: " + fmt(off10) + ", " +
                fmt(off100));
  });

  run_criterion(5, "exact driving block decoupling", [] {
    const auto sc = models::make_qubit_scenario({}, weak_bath());
    const auto gauge = cd::GaugeProvider::exact(sc);
    bool ok = true;
    std::string detail;
    for (double tau : {1.0, 10.0, 100.0}) {
      const auto lk = leakage_of(anneal(sc, gauge, tau));
      ok = ok && lk.empty_blocks == 2 && lk.peak < 1e-6;
      detail += "tau=" + fmt(tau) + ": " + fmt(lk.peak) + " (" +
                std::to_string(lk.empty_blocks) + " empty blocks)  ";
    }
    return std::make_pair(ok, detail + "threshold 1e-6");
  });

  run_criterion(6, "variational single-term decoupling", [] {
    const auto sc = models::make_qubit_scenario({}, weak_bath());
    const auto none = leakage_of(anneal(sc, cd::GaugeProvider::none(), 1.0));
    const auto sy = leakage_of(anneal(
        sc,
        cd::GaugeProvider::variational(sc, cd::named_ansatz("Sy", sc)), 1.0));
    const bool ok = none.peak > 1e-1 && sy.peak < 1e-2;
    return std::make_pair(ok, "tau=1 leakage: none " + fmt(none.peak) +
                                  " (> 1e-1), Sy " + fmt(sy.peak) +
                                  " (< 1e-2)");
  });

  run_criterion(7, "closed-system variational coefficient", [] {
    const auto sc = models::make_qubit_scenario({}, std::nullopt);
    const cd::GeneratorFn gen_at = [&](double s) {
      return models::lindbladian(sc, s);
    };
    const auto terms = cd::named_ansatz("Sy", sc);
    double max_coeff_err = 0.0, max_residual = 0.0;
    for (int k = 0; k <= 20; ++k) {
      const double s = k / 20.0;
      const auto gen = gen_at(s);
      const auto dgen = cd::generator_derivative(gen_at, s);
      const auto sol =
          cd::solve_variational(cd::assemble_lsq(gen, dgen.value, terms, sc.basis));
      const double want = std::abs(cd::closed_system_gauge_qubit(s, {})) / 2.0;
      max_coeff_err =
          std::max(max_coeff_err, std::abs(std::abs(sol.coefficients(0)) - want));
      max_residual = std::max(max_residual, sol.residual);
    }
    const bool ok = max_coeff_err < 1e-8 && max_residual < 1e-8;
    return std::make_pair(ok, "21-point grid: max |coeff| error " +
                                  fmt(max_coeff_err) + ", max residual " +
                                  fmt(max_residual) + " (both < 1e-8)");
  });

  run_criterion(8, "unitary spectrum structure", [] {
    struct Case {
      models::AnnealingScenario sc;
      double s;
    };
    const std::vector<Case> cases = {
        {models::make_qubit_scenario({}, std::nullopt), 0.3},
        {models::make_pspin_scenario({}, std::nullopt), 0.5}};
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
      const Matrix h = c.sc.hamiltonian(c.s);
      const int d = c.sc.dim();
      const auto sp =
          spectral::decompose(ops::unitary_superop(h, c.sc.basis));
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      std::vector<Complex> want;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          want.emplace_back(0.0, es.eigenvalues()(a) - es.eigenvalues()(b));
      std::vector<Complex> got(sp.eigenvalues.data(),
                               sp.eigenvalues.data() + sp.eigenvalues.size());
      const auto by_imag = [](const Complex& x, const Complex& y) {
        return x.imag() < y.imag();
      };
      std::sort(want.begin(), want.end(), by_imag);
      std::sort(got.begin(), got.end(), by_imag);
      double err = 0.0;
      for (std::size_t i = 0; i < want.size(); ++i)
        err = std::max(err, std::abs(got[i] - want[i]));
      int zeros = 0;
      for (const auto& lam : got)
        if (std::abs(lam) < 1e-10)
          ++zeros;
      ok = ok && err < 1e-10 && zeros == d;
      detail += "D=" + std::to_string(d) + ": error " + fmt(err) + ", " +
                std::to_string(zeros) + " zero modes  ";
    }
    return std::make_pair(ok, detail + "(level differences, D zeros each)");
  });

  run_criterion(9, "p-spin spectral structure and steady state", [] {
    const auto sc = models::make_pspin_scenario({}, weak_bath());
    bool ok = true;
    std::string detail;
    for (double s : {0.3, 0.5, 0.8}) {
      const auto sp = spectral::decompose(models::ame_superop(sc, s));
      double min_gap = 1e300;
      for (Eigen::Index a = 0; a < sp.size(); ++a)
        for (Eigen::Index b = a + 1; b < sp.size(); ++b)
          min_gap = std::min(min_gap,
                             std::abs(sp.eigenvalues(a) - sp.eigenvalues(b)));
      const auto ss = spectral::find_steady_state(sp);
      const Matrix gibbs =
          models::thermal_state(sc.hamiltonian(s), sc.bath->beta);
      const double iss_err =
          (ops::devectorize(ss.state) - gibbs).cwiseAbs().maxCoeff();
      ok = ok && sp.diagonalizable && sp.size() == 16 && min_gap > 1e-8 &&
           iss_err < 1e-6;
      detail += "s=" + fmt(s) + ": gap " + fmt(min_gap) + ", ISS-Gibbs " +
                fmt(iss_err) + "  ";
    }
    return std::make_pair(ok, detail + "(16 distinct blocks, ISS < 1e-6)");
  });

  run_criterion(10, "p-spin adiabatic fidelity floor", [] {
    const auto sc = models::make_pspin_scenario({}, weak_bath());
    const auto obs = anneal(sc, cd::GaugeProvider::none(), 10.0,
                            evo::InitialState::Thermal);
    const double floor = obs.fidelity.minCoeff();
    const bool ok = floor >= 0.94;
    return std::make_pair(ok, "min fidelity along the path " + fmt(floor) +
                                  " (>= 0.94)");
  });

  run_criterion(11, "ansatz ordering", [] {
    const auto make_provider = [](const models::AnnealingScenario& sc,
                                  const std::string& ansatz) {
      return cd::GaugeProvider::variational(sc, cd::named_ansatz(ansatz, sc));
    };

    const auto weak = models::make_pspin_scenario({}, weak_bath());
    const auto fid = [&](const cd::GaugeProvider& g) {
      return last(anneal(weak, g, 1.0, evo::InitialState::Thermal).fidelity);
    };
    const double f_none = fid(cd::GaugeProvider::none());
    const double f_bath = fid(make_provider(weak, "basis_dissipators"));
    const double f_sy = fid(make_provider(weak, "Sy"));
    const double f_cyc = fid(make_provider(weak, "SxSySz_cyclic"));
    const bool weak_ok =
        f_cyc >= f_sy && f_sy >= f_none && std::abs(f_bath - f_none) <= 0.02;

    const auto strong = models::make_pspin_scenario({}, strong_bath());
    const auto pop = [&](const cd::GaugeProvider& g) {
      return last(anneal(strong, g, 10.0, evo::InitialState::Ground).p_minus);
    };
    const double p_none = pop(cd::GaugeProvider::none());
    const double p_bath = pop(make_provider(strong, "basis_dissipators"));
    const double p_sy = pop(make_provider(strong, "Sy"));
    const double p_cyc = pop(make_provider(strong, "SxSySz_cyclic"));
    const bool strong_ok =
        std::min(p_sy, p_cyc) > p_none && p_none > p_bath;

    return std::make_pair(
        weak_ok && strong_ok,
        "weak coupling fidelity none/Bath/Sy/Cyclic " + fmt(f_none) + "/" +
            fmt(f_bath) + "/" + fmt(f_sy) + "/" + fmt(f_cyc) +
            "; strong coupling population " + fmt(p_none) + "/" + fmt(p_bath) +
            "/" + fmt(p_sy) + "/" + fmt(p_cyc));
  });

  run_criterion(12, "validation suite", [] {
    const auto rep = harness::cmd_validate(0);
    int passed = 0;
    for (const auto& c : rep.checks)
      if (c.passed)
        ++passed;
    return std::make_pair(rep.passed(),
                          std::to_string(passed) + "/" +
                              std::to_string(rep.checks.size()) +
                              " invariant checks passed");
  });

  std::printf("%d of 12 criteria passed\n", 12 - g_failures);
  return g_failures;
}
