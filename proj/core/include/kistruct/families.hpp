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

#include "kistruct/cp.hpp"
#include "kistruct/density.hpp"
#include "kistruct/rng.hpp"
#include "kistruct/types.hpp"

namespace kistruct {

// --- seeded primitives -------------------------------------------------------

/// Full-rank random density operator GG†/tr(GG†) from a complex Gaussian G.
DensityOperator random_density(int dim, SeededRng& rng);

/// Haar-like random unitary: Gram-Schmidt of a Gaussian matrix with each
/// column's first nonzero entry fixed real positive, for cross-platform
/// reproducibility.
Matrix random_unitary(int dim, SeededRng& rng);

/// Probability vector with a small floor to keep planted structures
/// generic.
std::vector<double> random_probabilities(int count, SeededRng& rng, double floor = 0.02);

// --- family classes ----------------------------------------------------------

/// Members ρ_i ⊗ ω_e with one shared seeded environment state.
JointStateFamily gen_product_family(int dim_s, int dim_e, int count, std::uint64_t seed);

/// One direct summand of the system space: either a fixed joint block
/// (shared ω_{se,j}) or a free block carrying per-member system states
/// over a shared ω_{e,j}.
struct LiuTongBlock {
  int dim = 0;        // system dimension of the summand
  bool fixed = false; // fixed joint block vs free system block
};

/// Block-diagonal families over ⊕_j H_{s,j}: members
/// (⊕_{fixed} p_j ω_{se,j}) ⊕ (⊕_{free} p_j ρ_{s,j} ⊗ ω_{e,j}) with
/// seeded per-member probabilities.
JointStateFamily gen_liu_tong(const std::vector<LiuTongBlock>& blocks, int dim_e, int count,
                              std::uint64_t seed);

/// 0 ≤ E ≤ 1 on the ancilla, used for post-selection.
struct POVMElement {
  int dim_a = 0;
  Matrix matrix;
};
POVMElement make_povm_element(Matrix m, double atol = kDefaultAtol);
POVMElement random_povm_element(int dim_a, SeededRng& rng);

/// Shape of one middle-system factor H_{l_j} ⊗ H_{r_j}.
struct MarkovBlockSpec {
  int dim_l = 0;
  int dim_r = 0;
};

/// Ancilla-system-environment state, ancilla split as a1 ⊗ a2 with
/// dim_a1 = number of blocks. Index order is ancilla-major:
/// joint = a * (dim_s*dim_e) + s * dim_e + e.
struct TripartiteState {
  int dim_a1 = 0;
  int dim_a2 = 0;
  int dim_s = 0;
  int dim_e = 0;
  std::vector<MarkovBlockSpec> blocks;
  DensityOperator state;

  int dim_a() const { return dim_a1 * dim_a2; }
};

/// Short quantum Markov chain ⊕_j p_j ρ_{a l_j} ⊗ ρ_{r_j e} with seeded
/// random factors. dim_a2 < max dim_l violates the ancilla sizing rule
/// and throws std::invalid_argument; -1 picks the minimum.
TripartiteState gen_markov_chain(const std::vector<MarkovBlockSpec>& blocks, int dim_e,
                                 std::uint64_t seed, int dim_a2 = -1);

/// Canonical chain Σ_j p_j |j><j|_{a1} ⊗ φ_{a2,l_j} ⊗ ω_{r_j e} with
/// computational-basis maximally entangled φ; post-selecting on the
/// ancilla steers the block-j quantum part to any chosen state.
TripartiteState canonical_markov_from_structure(const std::vector<MarkovBlockSpec>& blocks,
                                                int dim_e, std::uint64_t seed, int dim_a2 = -1);

/// tr_a[(E ⊗ 1 ⊗ 1) ρ_ase] normalized. Throws PostSelectionError when the
/// selection probability is below 1e-12.
DensityOperator post_select(const TripartiteState& tri, const POVMElement& effect);

/// A family of joint states drawn directly in the block-product form, with
/// a seeded system-basis rotation; always certified.
JointStateFamily gen_certified_random(int dim_s, int dim_e, int count, std::uint64_t seed);

enum class CounterexampleKind { kBellVsProduct, kCoherentBlocks, kVaryingOmega };

/// Injective families that fail the CP guarantee in a controlled way:
///   bell-vs-product : maximally entangled state next to |00><00|
///   coherent-blocks : a member carries joint coherence across the blocks
///   varying-omega   : the redundant joint part differs between members
JointStateFamily gen_counterexample(CounterexampleKind kind, int dim_s, int dim_e,
                                    std::uint64_t seed);

// --- planted decompositions (test corpus) ------------------------------------

/// System-only family assembled as ⊕_j p_j ρ_{l_j} ⊗ ω_{r_j} in a random
/// basis, along with the planted shape for recovery checks.
struct PlantedKiFamily {
  std::vector<MarkovBlockSpec> shape;
  Matrix basis;  // planted unitary on the ambient space
  std::vector<DensityOperator> members;
  std::vector<std::vector<double>> probabilities;  // [member][block]
};

PlantedKiFamily gen_planted_ki(const std::vector<MarkovBlockSpec>& shape, int member_count,
                               std::uint64_t seed);

/// Random block shape with Σ l_j r_j = dim and at most max_blocks factors.
std::vector<MarkovBlockSpec> random_block_shape(int dim, int max_blocks, SeededRng& rng);

}  // namespace kistruct
