#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lindcd/basis.hpp"
#include "lindcd/superop.hpp"

using namespace lindcd;

namespace {

Matrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      a(i, j) = Complex(dist(rng), dist(rng));
  return ((a + a.adjoint()) / 2.0).eval();
}

}  // namespace

TEST_CASE("basis elements are Hermitian, traceless past the identity") {
  for (int dim = 2; dim <= 5; ++dim) {
    const ops::OperatorBasis basis = ops::build_basis(dim);
    REQUIRE(basis.size() == dim * dim);
    CHECK((basis.elements[0] - Matrix::Identity(dim, dim)).norm() ==
          doctest::Approx(0.0).epsilon(1e-14));
    for (Eigen::Index k = 0; k < basis.size(); ++k) {
      const Matrix& s = basis.elements[static_cast<std::size_t>(k)];
      CHECK((s - s.adjoint()).norm() < 1e-13);
      if (k > 0)
        CHECK(std::abs(s.trace()) < 1e-13);
    }
  }
}

TEST_CASE("basis is orthonormal under the normalized trace inner product") {
  for (int dim = 2; dim <= 5; ++dim)
    CHECK(ops::orthonormality_defect(ops::build_basis(dim)) < 1e-12);
}

TEST_CASE("build_basis rejects dimensions below two") {
  CHECK_THROWS_AS(ops::build_basis(1), std::invalid_argument);
  CHECK_THROWS_AS(ops::build_basis(0), std::invalid_argument);
}

TEST_CASE("hs_inner normalization") {
  const auto basis = ops::make_basis(3);
  for (Eigen::Index a = 0; a < basis->size(); ++a)
    for (Eigen::Index b = 0; b < basis->size(); ++b) {
      const Complex v =
          ops::hs_inner(basis->elements[static_cast<std::size_t>(a)],
                        basis->elements[static_cast<std::size_t>(b)]);
      CHECK(std::abs(v - (a == b ? 1.0 : 0.0)) < 1e-13);
    }
}

TEST_CASE("vectorize and devectorize invert each other") {
  std::mt19937_64 rng(7);
  for (int dim : {2, 3, 4}) {
    const auto basis = ops::make_basis(dim);
    for (int trial = 0; trial < 8; ++trial) {
      const Matrix rho = random_hermitian(dim, rng);
      const ops::CoherenceVector v = ops::vectorize(rho, basis);
      CHECK(v.r.imag().cwiseAbs().maxCoeff() < 1e-13);
      CHECK((ops::devectorize(v) - rho).norm() < 1e-12);
      // The trace lives entirely in the identity coefficient.
      CHECK(std::abs(rho.trace().real() - dim * v.r(0).real()) < 1e-12);
    }
  }
}

TEST_CASE("vectorize rejects mismatched dimensions") {
  const auto basis = ops::make_basis(2);
  CHECK_THROWS_AS(ops::vectorize(Matrix::Identity(3, 3), basis),
                  std::invalid_argument);
}

TEST_CASE("unitary superoperator is real and antisymmetric") {
  std::mt19937_64 rng(11);
  for (int dim : {2, 4}) {
    const auto basis = ops::make_basis(dim);
    const Matrix h = random_hermitian(dim, rng);
    const ops::Superoperator u = ops::unitary_superop(h, basis);
    CHECK(u.M.imag().cwiseAbs().maxCoeff() < 1e-12);
    CHECK((u.M + u.M.transpose()).norm() < 1e-11);
    CHECK(u.M.row(0).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("unitary superoperator reproduces the commutator action") {
  std::mt19937_64 rng(13);
  const int dim = 3;
  const auto basis = ops::make_basis(dim);
  const Matrix h = random_hermitian(dim, rng);
  const ops::Superoperator u = ops::unitary_superop(h, basis);
  const Matrix rho = random_hermitian(dim, rng);
  ops::CoherenceVector v = ops::vectorize(rho, basis);
  v.r = (u.M * v.r).eval();
  const Matrix want = Complex(0, -1) * (h * rho - rho * h);
  CHECK((ops::devectorize(v) - want).norm() < 1e-11);
}

TEST_CASE("unitary superoperator rejects non-Hermitian input") {
  const auto basis = ops::make_basis(2);
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = 1.0;
  CHECK_THROWS_AS(ops::unitary_superop(h, basis), std::invalid_argument);
}

TEST_CASE("dissipator superoperator matches the channel formula") {
  std::mt19937_64 rng(17);
  const int dim = 3;
  const auto basis = ops::make_basis(dim);
  std::normal_distribution<double> dist;
  Matrix jump(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      jump(i, j) = Complex(dist(rng), dist(rng));
  const double rate = 0.7;
  const ops::Superoperator d = ops::dissipator_superop({jump}, {rate}, basis);
  CHECK(d.M.row(0).cwiseAbs().maxCoeff() < 1e-12);

  const Matrix rho = random_hermitian(dim, rng);
  ops::CoherenceVector v = ops::vectorize(rho, basis);
  v.r = (d.M * v.r).eval();
  const Matrix jj = jump.adjoint() * jump;
  const Matrix want =
      rate * (jump * rho * jump.adjoint() - 0.5 * (jj * rho + rho * jj));
  CHECK((ops::devectorize(v) - want).norm() < 1e-11);
}

TEST_CASE("dissipator superoperator rejects negative rates") {
  const auto basis = ops::make_basis(2);
  CHECK_THROWS_AS(
      ops::dissipator_superop({Matrix::Identity(2, 2)}, {-1.0}, basis),
      std::invalid_argument);
}

TEST_CASE("hermiticity defect separates Hermitian from non-Hermitian") {
  std::mt19937_64 rng(23);
  CHECK(ops::hermiticity_defect(random_hermitian(3, rng)) < 1e-14);
  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 1) = Complex(0.0, 2.0);
  skew(1, 0) = Complex(0.0, 2.0);
  CHECK(ops::hermiticity_defect(skew) > 0.1);
}
