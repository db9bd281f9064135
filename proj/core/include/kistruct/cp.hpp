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
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "kistruct/density.hpp"
#include "kistruct/ki.hpp"
#include "kistruct/linalg.hpp"
#include "kistruct/types.hpp"

namespace kistruct {

/// Finite family of joint system-environment states with a declared
/// bipartition. Nonempty; members validated and dimension-consistent.
struct JointStateFamily {
  BipartitionDims dims;
  std::vector<DensityOperator> members;

  int member_count() const { return static_cast<int>(members.size()); }
};
JointStateFamily make_family(BipartitionDims dims, std::vector<DensityOperator> members);

/// Constructive certificate that a family guarantees completely positive
/// reduced dynamics: the KI decomposition of the reduced family together
/// with the fixed joint blocks ω_{r_j e}. Every member is
/// ⊕_j p_j ρ_{l_j} ⊗ ω_{r_j e}.
struct CPCertificate {
  BipartitionDims dims;
  KIDecomposition reduced;
  std::vector<DensityOperator> joint_omegas;  // per block, on dim_r * dim_e

  /// Reassembled joint member from the certificate data.
  Matrix reconstruct_joint(int member) const;
};

enum class ViolationKind { kInjectivity, kBlockCoherence, kVaryingRedundantPart };

std::string to_string(ViolationKind kind);

/// Structural obstruction, with the members/block that witness it and the
/// trace-norm magnitude of the violation (always above the tolerance used
/// for the check).
struct ViolationReport {
  ViolationKind condition;
  std::vector<int> members;
  int block = -1;
  double magnitude = 0.0;
  std::string detail;
};

struct InjectivityCheck {
  bool injective = true;
  int first = -1;
  int second = -1;
  double joint_distance = 0.0;
  double reduced_distance = 0.0;
};

/// The partial trace must be one-to-one on the family: two members that
/// differ jointly but share a reduced state make the reduced dynamics
/// ill-posed.
InjectivityCheck check_injectivity(const JointStateFamily& family, double tol = kDefaultAtol);

using CpDecision = std::variant<CPCertificate, ViolationReport>;

/// Decide whether the family guarantees CP reduced dynamics. Returns a
/// certificate when every member matches the block-product form over the
/// reduced KI decomposition, and a pinpointed violation otherwise
/// (injectivity violations correspond to the ill-posed verdict).
CpDecision check_cp_guarantee(const JointStateFamily& family, std::uint64_t seed,
                              double tol = kAlgebraTol);

/// Choi matrix of a linear map B(in) -> B(out), stored on in ⊗ out.
/// The map is CP exactly when the matrix is PSD.
struct ChoiMatrix {
  int in_dim = 0;
  int out_dim = 0;
  Matrix m;

  double min_eigenvalue() const;
  bool is_cp(double atol = kDefaultAtol) const;
  Matrix apply(const Matrix& x) const;
};

ChoiMatrix choi_of_map(const std::function<Matrix(const Matrix&)>& phi, int in_dim, int out_dim);

/// Kraus representation {K}: X -> Σ K X K†. Complete (Σ K†K = 1) when
/// synthesized from a certificate and a joint unitary.
struct KrausSet {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<Matrix> operators;

  Matrix apply(const Matrix& x) const;
  double completeness_defect() const;  // ||Σ K†K - 1||
  ChoiMatrix to_choi() const;
};

/// Assignment map Λ(ρ) = Σ_j tr_{r_j}(Π_j ρ Π_j) ⊗ ω_{r_j e}, extended
/// off the family support by routing the supplement to the reconstructed
/// average joint state so the map stays CP and trace-preserving.
Matrix assignment_apply(const CPCertificate& cert, const Matrix& rho_s);
ChoiMatrix assignment_map(const CPCertificate& cert);

/// Kraus operators K_{αβ} = <α_{e'}| U A |β_e> of the reduced dynamical
/// map, with A = Σ_j Π_j ω_{r_j e}^{1/2} ω_{r_j}^{-1/2}. `final_dims` is
/// the system/environment split at the final time.
KrausSet kraus_from_unitary(const CPCertificate& cert, const Matrix& u,
                            const BipartitionDims& final_dims);

/// Direct reduced dynamics on a family member: tr_{e'}(U ρ_se U†).
Matrix reduced_dynamics_member(const JointStateFamily& family, const Matrix& u,
                               const BipartitionDims& final_dims, int member);

/// Reduced dynamics extended to an arbitrary system state via the
/// assignment map: tr_{e'}(U Λ(ρ_s) U†).
Matrix reduced_dynamics_extended(const CPCertificate& cert, const Matrix& u,
                                 const BipartitionDims& final_dims, const Matrix& rho_s);

/// Quantum mutual information I = S(ρ_s) + S(ρ_e) - S(ρ_se).
double mutual_information(const DensityOperator& joint, const BipartitionDims& dims);

/// Mutual information of a certified member from the certificate data
/// alone: I = S(ρ_e) + Σ_j p_j (S(ω_{r_j}) - S(ω_{r_j e})). Never touches
/// the quantum parts.
double mutual_information_structured(const CPCertificate& cert, int member);

}  // namespace kistruct
