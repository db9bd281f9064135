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
#include <optional>
#include <vector>

#include "kistruct/algebra.hpp"
#include "kistruct/density.hpp"
#include "kistruct/types.hpp"

namespace kistruct {

/// Koashi-Imoto decomposition of a finite family of density operators:
/// a decomposition of the support into ⊕_j (l_j ⊗ r_j) such that every
/// family member is ⊕_j p_j ρ_{l_j} ⊗ ω_{r_j} with the ω_{r_j} fixed
/// across the family. The classical part lives in the probabilities, the
/// quantum part in the l-factors, and the redundant part in the fixed
/// ω_{r_j}.
struct KIDecomposition {
  int ambient_dim = 0;
  Matrix support_isometry;  // ambient_dim x support_dim
  Matrix support;           // ambient projector onto the family support

  struct Block {
    Matrix isometry;  // support_dim x (dim_l * dim_r), l-major columns
    int dim_l = 0;
    int dim_r = 0;
    DensityOperator omega;  // fixed redundant part on dim_r
  };
  std::vector<Block> blocks;

  // probabilities[i][j] = weight of block j in member i; quantum part is
  // absent when the probability is at or below kProbabilityFloor.
  std::vector<std::vector<double>> probabilities;
  std::vector<std::vector<std::optional<DensityOperator>>> quantum_parts;

  int member_count() const { return static_cast<int>(probabilities.size()); }
  int block_count() const { return static_cast<int>(blocks.size()); }

  /// Projector (in ambient coordinates) onto block j.
  Matrix block_projector(int j) const;

  /// Reassembled member in ambient coordinates.
  Matrix reconstruct(int member) const;
};

/// Compute the KI decomposition. Deterministic for a fixed seed; the
/// output is verified (reconstruction, minimality proxies) before being
/// returned, and KiError is thrown when no certified decomposition is
/// found after the retry ladder.
KIDecomposition ki_decompose(const std::vector<DensityOperator>& family, std::uint64_t seed,
                             double tol = kAlgebraTol);

struct PinchingCheck {
  bool invariant = false;
  std::vector<double> residuals;  // trace-norm residual per member
};

/// Does the pinching onto the block subspaces leave every family member
/// unchanged? Σ_j Π_j ρ_i Π_j = ρ_i within tol.
PinchingCheck pinching_invariance_check(const KIDecomposition& decomp,
                                        const std::vector<DensityOperator>& family,
                                        double tol = kAlgebraTol);

/// Verification report for a (possibly hand-built) decomposition against a
/// family: reconstruction, probability bookkeeping, per-block
/// irreducibility (the normalized block data generates the full l-factor
/// algebra), and pairwise non-mergeability of blocks.
struct KiVerification {
  std::vector<double> reconstruction_residuals;  // trace norm per member
  std::vector<double> probability_sum_errors;    // |Σ_j p_j - 1| per member
  std::vector<bool> block_irreducible;
  bool non_mergeable = true;
  bool pinching_ok = false;
  double max_pinching_residual = 0.0;

  bool passed(double tol = kAlgebraTol) const;
};

KiVerification verify_ki(const KIDecomposition& decomp,
                         const std::vector<DensityOperator>& family, std::uint64_t seed);

}  // namespace kistruct
