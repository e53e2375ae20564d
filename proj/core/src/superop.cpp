#include "lindcd/superop.hpp"

#include <cmath>
#include <stdexcept>

namespace lindcd::ops {

namespace {

void check_square(const Matrix& m, int dim, const char* fn) {
  if (m.rows() != dim || m.cols() != dim)
    throw std::invalid_argument(std::string(fn) + ": operator dimension mismatch");
}

}  // namespace

Matrix comm(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix anticomm(const Matrix& a, const Matrix& b) { return a * b + b * a; }

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).norm() / std::max(1.0, m.norm());
}

CoherenceVector vectorize(const Matrix& rho, BasisPtr basis) {
  if (!basis)
    throw std::invalid_argument("vectorize: null basis");
  check_square(rho, basis->dim, "vectorize");
  CoherenceVector v;
  v.basis = basis;
  v.r.resize(basis->size());
  for (Eigen::Index i = 0; i < basis->size(); ++i)
    v.r(i) = hs_inner(basis->elements[i], rho);
  return v;
}

Matrix devectorize(const CoherenceVector& v) {
  if (!v.basis)
    throw std::invalid_argument("devectorize: null basis");
  if (v.r.size() != v.basis->size())
    throw std::invalid_argument("devectorize: coefficient count mismatch");
  Matrix rho = Matrix::Zero(v.basis->dim, v.basis->dim);
  for (Eigen::Index i = 0; i < v.basis->size(); ++i)
    rho += v.r(i) * v.basis->elements[i];
  return rho;
}

Superoperator superop_from_map(BasisPtr basis,
                               const std::function<Matrix(const Matrix&)>& map) {
  if (!basis)
    throw std::invalid_argument("superop_from_map: null basis");
  const Eigen::Index n = basis->size();
  Superoperator s;
  s.basis = basis;
  s.M.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Matrix image = map(basis->elements[k]);
    check_square(image, basis->dim, "superop_from_map");
    for (Eigen::Index j = 0; j < n; ++j)
      s.M(j, k) = hs_inner(basis->elements[j], image);
  }
  return s;
}

Superoperator unitary_superop(const Matrix& h, BasisPtr basis) {
  if (!basis)
    throw std::invalid_argument("unitary_superop: null basis");
  check_square(h, basis->dim, "unitary_superop");
  if (hermiticity_defect(h) > 1e-10)
    throw std::invalid_argument("unitary_superop: hamiltonian is not hermitian");
  const Complex mi(0.0, -1.0);
  return superop_from_map(basis,
                          [&](const Matrix& x) -> Matrix { return mi * comm(h, x); });
}

Superoperator dissipator_superop(const std::vector<Matrix>& jump_ops,
                                 const std::vector<double>& rates,
                                 BasisPtr basis) {
  if (!basis)
    throw std::invalid_argument("dissipator_superop: null basis");
  if (jump_ops.size() != rates.size())
    throw std::invalid_argument("dissipator_superop: jump operator and rate counts differ");
  for (const Matrix& g : jump_ops)
    check_square(g, basis->dim, "dissipator_superop");
  for (double r : rates) {
    if (!(r >= 0.0) || !std::isfinite(r))
      throw std::invalid_argument("dissipator_superop: rates must be finite and nonnegative");
  }
  return superop_from_map(basis, [&](const Matrix& x) -> Matrix {
    Matrix out = Matrix::Zero(basis->dim, basis->dim);
    for (std::size_t k = 0; k < jump_ops.size(); ++k) {
      const Matrix& g = jump_ops[k];
      out += rates[k] * (g * x * g.adjoint() - 0.5 * anticomm(g.adjoint() * g, x));
    }
    return out;
  });
}

}  // namespace lindcd::ops
