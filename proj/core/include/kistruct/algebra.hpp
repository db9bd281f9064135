// Copyright 2026 The kistruct authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include "kistruct/types.hpp"

namespace kistruct {

/// Finite-dimensional *-algebra of matrices, represented by a basis that is
/// orthonormal under the trace inner product <A,B> = tr(A†B). The span
/// always contains the identity and is closed under adjoints and products
/// within the closure tolerance.
struct StarAlgebra {
  int ambient_dim = 0;
  std::vector<Matrix> basis;

  int dim() const { return static_cast<int>(basis.size()); }
};

/// One factor of the block decomposition: the isometry embeds
/// C^{dim_l} ⊗ C^{dim_r} into the ambient space.
struct AlgebraBlock {
  Matrix isometry;  // ambient_dim x (dim_l * dim_r)
  int dim_l = 0;
  int dim_r = 0;
};

/// Decomposition of the ambient space as ⊕_j (l_j ⊗ r_j) under which the
/// algebra acts as ⊕_j B(l_j) ⊗ 1_{r_j}. Block ranges are mutually
/// orthogonal and fill the ambient space.
struct BlockStructure {
  int ambient_dim = 0;
  std::vector<AlgebraBlock> blocks;

  int total_dim() const;
};

/// Smallest *-algebra containing the generators and the identity.
/// Closure adds product/adjoint residual directions whose relative norm
/// exceeds tol; the result is idempotent under re-closing.
StarAlgebra close_star_algebra(const std::vector<Matrix>& generators, double tol = kAlgebraTol);

/// All matrices commuting with every basis element, as a StarAlgebra.
StarAlgebra commutant(const StarAlgebra& a);

/// Center = A ∩ A'. Its dimension equals the number of blocks of A.
StarAlgebra algebra_center(const StarAlgebra& a);

/// Block decomposition of a unital *-algebra. Deterministic for a fixed
/// seed; blocks are sorted by (dim_l, dim_r), ties broken by a rounded
/// fingerprint of the isometry. Throws DecompositionError when the
/// structure cannot be certified.
BlockStructure decompose_algebra(const StarAlgebra& a, std::uint64_t seed);

/// Best-fit block coefficients of an arbitrary matrix against a structure:
/// b_j minimizing ||B - Σ_j V_j (b_j ⊗ 1_{r_j}) V_j†||_F, plus the
/// Frobenius residual of the fit.
struct BlockCoefficients {
  std::vector<Matrix> l_parts;
  double residual = 0.0;
};
BlockCoefficients project_onto_structure(const BlockStructure& s, const Matrix& b);

/// Membership test for span(basis) under the trace inner product.
double span_residual(const std::vector<Matrix>& basis, const Matrix& candidate);

}  // namespace kistruct
