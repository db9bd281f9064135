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
#include <utility>
#include <vector>

#include "kistruct/cp.hpp"
#include "kistruct/density.hpp"
#include "kistruct/types.hpp"

namespace kistruct {

/// A linear map known only on finitely many states. Inputs are pairwise
/// distinct; any linear dependency among the inputs must be matched by the
/// outputs, otherwise no linear extension exists at all.
struct MapOnStates {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<std::pair<Matrix, Matrix>> pairs;
};

/// Validating constructor; throws std::invalid_argument on duplicate
/// inputs (trace distance <= 1e-9) or inconsistent linear data.
MapOnStates make_map_on_states(int in_dim, int out_dim,
                               std::vector<std::pair<Matrix, Matrix>> pairs);

/// Restriction data of the reduced dynamics: reduced member -> evolved
/// reduced member under U and the final partition. Members with duplicate
/// reduced states are deduplicated (their outputs agree by injectivity).
MapOnStates map_from_family(const JointStateFamily& family, const Matrix& u,
                            const BipartitionDims& final_dims);

/// A PSD operator in the affine span of the inputs whose image, forced by
/// linearity, has a negative eigenvalue: direct proof that no CP (indeed
/// no positive) extension exists.
struct ExtensionWitness {
  Matrix input;         // PSD within 1e-10
  Matrix forced_image;  // Hermitian with min eigenvalue < -1e-8
  double min_eigenvalue = 0.0;
};

/// Search the PSD boundary of the affine span: pairwise lines through the
/// inputs plus seeded random directions. Returns the strongest witness
/// found, or nullopt.
std::optional<ExtensionWitness> linear_extension_witness(const MapOnStates& m,
                                                         std::uint64_t seed = 0);

enum class FeasibilityStatus { kFeasible, kInfeasible, kUndecided };

/// Outcome of the Choi-matrix feasibility run. `choi` is set on kFeasible
/// and satisfies the pairing constraints and PSD within tol; `gap` is the
/// terminal distance between the PSD cone and the constraint set
/// (meaningful for kInfeasible/kUndecided).
struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::kUndecided;
  std::optional<ChoiMatrix> choi;
  double gap = 0.0;
  int iterations = 0;
};

/// Decide whether a CP map matching the pairs exists, by Dykstra-type
/// alternating projections on the Choi matrix between the PSD cone and
/// the affine set {J : tr_in[J (ρ_iᵀ ⊗ 1)] = σ_i}. Infeasibility is
/// reported when the gap stalls at 10*tol or more; it is heuristic, so
/// negative verdicts should be cross-checked with
/// linear_extension_witness.
FeasibilityResult cp_feasibility(const MapOnStates& m, int max_iter = 20000, double tol = 1e-7);

}  // namespace kistruct
