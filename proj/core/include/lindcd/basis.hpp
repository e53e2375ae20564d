#pragma once

#include <memory>
#include <vector>

#include "lindcd/types.hpp"

namespace lindcd::ops {

// Orthonormal Hermitian operator basis for a D-dimensional Hilbert space,
// normalized so that Tr(S_i S_j)/D = delta_ij. Element 0 is the identity;
// the D(D-1) real/imaginary off-diagonal pairs follow, diagonal patterns last.
struct OperatorBasis {
  int dim = 0;                   // Hilbert-space dimension D
  std::vector<Matrix> elements;  // D^2 Hermitian matrices

  Eigen::Index size() const { return static_cast<Eigen::Index>(elements.size()); }
};

using BasisPtr = std::shared_ptr<const OperatorBasis>;

// Hilbert-Schmidt pairing Tr(A^dag B)/D used throughout; for the Hermitian
// basis elements the dagger is a no-op but keeping it makes the pairing a
// genuine inner product on arbitrary matrices.
Complex hs_inner(const Matrix& a, const Matrix& b);

OperatorBasis build_basis(int dim);
BasisPtr make_basis(int dim);

// Largest deviation of Tr(S_i S_j)/D from delta_ij over all pairs.
double orthonormality_defect(const OperatorBasis& basis);

}  // namespace lindcd::ops
