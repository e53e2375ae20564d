#include "lindcd/basis.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace lindcd::ops {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Diagonal sign patterns (v_k)_j = (-1)^popcount(k & j), k = 1..D-1. Rows of
// a Walsh-Hadamard matrix: mutually orthogonal, entries +-1, trace zero.
void append_hadamard_diagonals(OperatorBasis& basis) {
  const int d = basis.dim;
  for (int k = 1; k < d; ++k) {
    Matrix m = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j)
      m(j, j) = (std::popcount(static_cast<unsigned>(k & j)) % 2 == 0) ? 1.0 : -1.0;
    basis.elements.push_back(m);
  }
}

// Fallback for non-power-of-two D: Gram-Schmidt over projector seeds |k><k|
// against the identity and previously accepted diagonals, normalized under
// the Tr(.)/D pairing.
void append_gram_schmidt_diagonals(OperatorBasis& basis) {
  const int d = basis.dim;
  std::vector<Matrix> accepted;
  accepted.push_back(Matrix::Identity(d, d));
  for (int k = 1; k < d; ++k) {
    Matrix v = Matrix::Zero(d, d);
    v(k, k) = 1.0;
    for (const Matrix& u : accepted)
      v -= (hs_inner(u, v) / hs_inner(u, u)) * u;
    const double norm = std::sqrt(std::real(hs_inner(v, v)));
    if (norm < 1e-12)
      throw std::logic_error("build_basis: degenerate diagonal seed");
    v /= norm;
    accepted.push_back(v);
    basis.elements.push_back(v);
  }
}

}  // namespace

Complex hs_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw std::invalid_argument("hs_inner: shape mismatch");
  return (a.adjoint() * b).trace() / static_cast<double>(a.rows());
}

OperatorBasis build_basis(int dim) {
  if (dim < 2)
    throw std::invalid_argument("build_basis: dimension must be at least 2");

  OperatorBasis basis;
  basis.dim = dim;
  basis.elements.reserve(static_cast<std::size_t>(dim) * dim);
  basis.elements.push_back(Matrix::Identity(dim, dim));

  // Off-diagonal pairs ordered by the index rule i = (m-l) + (l-1)(2D-l)/2
  // over 1-indexed row/column pairs l < m; iterating l then m visits the
  // pair indices 1..D(D-1)/2 in increasing order.
  const double c = std::sqrt(dim / 2.0);
  const Complex ic(0.0, 1.0);
  for (int l = 0; l < dim; ++l) {
    for (int m = l + 1; m < dim; ++m) {
      Matrix sym = Matrix::Zero(dim, dim);
      sym(l, m) = c;
      sym(m, l) = c;
      basis.elements.push_back(sym);

      Matrix asym = Matrix::Zero(dim, dim);
      asym(l, m) = ic * c;
      asym(m, l) = -ic * c;
      basis.elements.push_back(asym);
    }
  }

  if (power_of_two(dim))
    append_hadamard_diagonals(basis);
  else
    append_gram_schmidt_diagonals(basis);
  return basis;
}

BasisPtr make_basis(int dim) {
  return std::make_shared<const OperatorBasis>(build_basis(dim));
}

double orthonormality_defect(const OperatorBasis& basis) {
  const Eigen::Index n = basis.size();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const Complex g = hs_inner(basis.elements[i], basis.elements[j]);
      const double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g - Complex(target)));
    }
  }
  return worst;
}

}  // namespace lindcd::ops
