#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "lindcd/evolution.hpp"

using namespace lindcd;

namespace {

models::AnnealingScenario closed_qubit() {
  return models::make_qubit_scenario({}, std::nullopt);
}

models::AnnealingScenario open_qubit() {
  return models::make_qubit_scenario({}, models::BathSpec{});
}

}  // namespace

TEST_CASE("initial state kinds") {
  const auto sc = closed_qubit();
  const auto g = evo::initial_state(sc, evo::InitialState::Ground);
  const Matrix rho = ops::devectorize(g);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sc.hamiltonian(0.0));
  const Vector ground = es.eigenvectors().col(0);
  const Matrix proj = ground * ground.adjoint();
  CHECK((rho - proj).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(evo::initial_state(sc, evo::InitialState::Thermal),
                  std::invalid_argument);

  const auto osc = open_qubit();
  const auto t = evo::initial_state(osc, evo::InitialState::Thermal);
  const Matrix gibbs =
      models::thermal_state(osc.hamiltonian(0.0), osc.bath->beta);
  CHECK((ops::devectorize(t) - gibbs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("closed annealing lands at the known final population") {
  const auto sc = closed_qubit();
  const auto traj = evo::evolve(sc, cd::GaugeProvider::none(), 10.0);
  REQUIRE(traj.s.size() == 201);
  CHECK(traj.s.front() == 0.0);
  CHECK(traj.s.back() == 1.0);
  const Matrix rho_final = ops::devectorize(traj.states.back());
  const double p = evo::ground_state_probability(rho_final, sc.hamiltonian(1.0));
  CHECK(p == doctest::Approx(0.911112).epsilon(1e-3));
  CHECK(traj.max_trace_drift < 1e-8);
}

TEST_CASE("exact counterdiabatic driving keeps empty blocks empty") {
  const auto sc = open_qubit();
  const auto traj = evo::evolve(sc, cd::GaugeProvider::exact(sc), 1.0,
                                {.samples = 51});
  const auto obs = evo::compute_observables(traj);
  // Blocks that start unpopulated stay unpopulated, so the ground-state
  // population survives a ramp fast enough to wreck the undriven system.
  double leak = 0.0;
  for (Eigen::Index c = 0; c < obs.block_overlap.cols(); ++c)
    if (obs.block_overlap(0, c) < 1e-9)
      leak = std::max(leak, obs.block_overlap.col(c).maxCoeff());
  CHECK(leak < 1e-6);
  CHECK(obs.p_minus(obs.p_minus.size() - 1) > 0.99);
  for (Eigen::Index k = 0; k < obs.trace_error.size(); ++k)
    CHECK(obs.trace_error(k) < 1e-8);
}

TEST_CASE("evolve validates its arguments") {
  const auto sc = closed_qubit();
  CHECK_THROWS_AS(evo::evolve(sc, cd::GaugeProvider::none(), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(evo::evolve(sc, cd::GaugeProvider::none(), -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      evo::evolve(sc, cd::GaugeProvider::none(), 1.0, {.samples = 1}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      evo::evolve(sc, cd::GaugeProvider::none(), 1.0, {.rel_tol = 0.0}),
      std::invalid_argument);
}

TEST_CASE("uhlmann fidelity basics") {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  Matrix sigma = Matrix::Zero(2, 2);
  sigma(1, 1) = 1.0;
  CHECK(evo::uhlmann_fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evo::uhlmann_fidelity(rho, sigma) == doctest::Approx(0.0).epsilon(1e-12));
  const Matrix mixed = 0.5 * Matrix::Identity(2, 2);
  CHECK(evo::uhlmann_fidelity(mixed, rho) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(evo::uhlmann_fidelity(rho, mixed) ==
        doctest::Approx(evo::uhlmann_fidelity(mixed, rho)).epsilon(1e-12));
  CHECK_THROWS_AS(evo::uhlmann_fidelity(2.0 * rho, sigma), evo::InvalidState);
}

TEST_CASE("ground state probability handles degeneracy") {
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      closed_qubit().hamiltonian(0.0));
  const Vector v = es.eigenvectors().col(0);
  const Matrix proj = v * v.adjoint();
  CHECK(evo::ground_state_probability(proj, closed_qubit().hamiltonian(0.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Fully degenerate Hamiltonian: every state is a ground state.
  int mult = 0;
  const Matrix id2 = Matrix::Identity(2, 2);
  CHECK(evo::ground_state_probability(0.5 * id2, Matrix::Zero(2, 2), 1e-9,
                                      &mult) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mult == 2);

  // Thermal two-level occupation 1 / (1 + exp(-beta gap)).
  const double beta = 0.7, gap = 1.3;
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = gap;
  const Matrix gibbs = models::thermal_state(h, beta);
  CHECK(evo::ground_state_probability(gibbs, h) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-beta * gap))).epsilon(1e-12));
}

TEST_CASE("cptp diagnostics report trace and positivity defects") {
  const auto sc = closed_qubit();
  auto v = evo::initial_state(sc, evo::InitialState::Ground);
  auto d = evo::cptp_diagnostics(v);
  CHECK(d.trace_error < 1e-12);
  CHECK(d.min_eigenvalue > -1e-12);
  v.r *= 1.5;
  d = evo::cptp_diagnostics(v);
  CHECK(d.trace_error == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("observables and CSV output are deterministic") {
  const auto sc = open_qubit();
  const auto traj = evo::evolve(sc, cd::GaugeProvider::none(), 1.0,
                                {.samples = 21});
  const auto obs = evo::compute_observables(traj);
  REQUIRE(obs.s.size() == 21);
  CHECK(obs.block_overlap.rows() == 21);
  CHECK(obs.block_overlap.cols() == 4);
  CHECK(obs.ground_multiplicity == 1);
  CHECK(obs.tracking_warnings == 0);
  // Population columns live in [0, 1] up to integration error.
  for (Eigen::Index k = 0; k < obs.p_minus.size(); ++k) {
    CHECK(obs.p_minus(k) > -1e-9);
    CHECK(obs.p_minus(k) < 1.0 + 1e-9);
  }

  std::ostringstream a, b;
  evo::write_csv(a, obs);
  evo::write_csv(b, obs);
  CHECK(a.str() == b.str());
  const std::string header = a.str().substr(0, a.str().find('\n'));
  CHECK(header ==
        "s,P_minus,fidelity,jb_overlap_0,jb_overlap_1,jb_overlap_2,"
        "jb_overlap_3,trace_error,min_eig");
  // Fixed-width scientific formatting.
  CHECK(a.str().find("e-") != std::string::npos);
}

TEST_CASE("sample grid honors the requested resolution") {
  const auto sc = closed_qubit();
  const auto traj =
      evo::evolve(sc, cd::GaugeProvider::none(), 1.0, {.samples = 11});
  REQUIRE(traj.s.size() == 11);
  for (std::size_t k = 0; k < traj.s.size(); ++k)
    CHECK(traj.s[k] == doctest::Approx(k / 10.0).epsilon(1e-14));
  CHECK(traj.steps_accepted > 0);
  CHECK(traj.rhs_evaluations >= 6 * traj.steps_accepted);
}
