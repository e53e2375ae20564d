#pragma once

#include <functional>
#include <vector>

#include "lindcd/basis.hpp"
#include "lindcd/types.hpp"

namespace lindcd::ops {

// Expansion coefficients r_i = Tr(S_i rho)/D of a density matrix in an
// operator basis. r is real for Hermitian rho but kept complex so that
// intermediate states of a propagation can be represented exactly.
struct CoherenceVector {
  BasisPtr basis;
  Vector r;
};

// Matrix representation [M]_jk = <<S_j | L[S_k]>> of a linear map on
// operators, acting on coherence vectors by plain matrix product.
struct Superoperator {
  BasisPtr basis;
  Matrix M;

  Eigen::Index size() const { return M.rows(); }
};

Matrix comm(const Matrix& a, const Matrix& b);
Matrix anticomm(const Matrix& a, const Matrix& b);

// Largest deviation from Hermiticity, relative to max(1, ||m||_F).
double hermiticity_defect(const Matrix& m);

CoherenceVector vectorize(const Matrix& rho, BasisPtr basis);
Matrix devectorize(const CoherenceVector& v);

// Column-by-column expansion of an arbitrary linear operator map.
Superoperator superop_from_map(BasisPtr basis,
                               const std::function<Matrix(const Matrix&)>& map);

// rho -> -i[H, rho]
Superoperator unitary_superop(const Matrix& h, BasisPtr basis);

// rho -> sum_k rate_k (G_k rho G_k^dag - {G_k^dag G_k, rho}/2)
Superoperator dissipator_superop(const std::vector<Matrix>& jump_ops,
                                 const std::vector<double>& rates,
                                 BasisPtr basis);

}  // namespace lindcd::ops
