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

#include <vector>

#include "kistruct/types.hpp"

namespace kistruct {

/// System/environment split of a joint Hilbert space. The joint index is
/// system-major throughout the library: joint = s * dim_e + e, which is
/// exactly the ordering produced by kron(system_op, environment_op).
struct BipartitionDims {
  int dim_s = 0;
  int dim_e = 0;

  int joint() const { return dim_s * dim_e; }
  bool valid() const { return dim_s >= 1 && dim_e >= 1; }
};

/// Which tensor factor a partial trace removes.
enum class Side { kSystem, kEnvironment };

Matrix kron(const Matrix& a, const Matrix& b);
Matrix direct_sum(const std::vector<Matrix>& blocks);

/// Trace out one side of a bipartite operator. `side` names the factor that
/// is removed: partial_trace(m, dims, Side::kEnvironment) returns the
/// system operator tr_e(m). Throws std::invalid_argument on a dimension
/// mismatch.
Matrix partial_trace(const Matrix& m, const BipartitionDims& dims, Side side);

bool is_hermitian(const Matrix& m, double atol = kDefaultAtol);

struct HermitianEig {
  RealVector values;  // ascending
  Matrix vectors;     // columns, unitary
};

/// Eigendecomposition of a Hermitian matrix. Throws std::invalid_argument
/// when the input is not Hermitian within atol.
HermitianEig hermitian_eig(const Matrix& m, double atol = kDefaultAtol);

// Spectral functions of positive semidefinite matrices. Eigenvalues below
// the relative rank cutoff are treated as exact zeros; a negative
// eigenvalue beyond atol is rejected with std::invalid_argument.
Matrix psd_sqrt(const Matrix& m, double atol = kDefaultAtol);
Matrix psd_inv_sqrt_on_support(const Matrix& m, double atol = kDefaultAtol);
Matrix psd_log_on_support(const Matrix& m, double atol = kDefaultAtol);

/// m^{it} on the support of m, zero on the kernel, so that
/// psd_imaginary_power(m, t) * psd_imaginary_power(m, -t) equals the
/// support projector.
Matrix psd_imaginary_power(const Matrix& m, double t, double atol = kDefaultAtol);

/// Projector onto the support of a single PSD matrix.
Matrix support_projector_of(const Matrix& psd, double atol = kDefaultAtol);

/// Projector onto the union of the supports of a PSD family (the support
/// of the uniform average). Throws std::invalid_argument on an empty
/// family or mixed dimensions.
Matrix support_projector(const std::vector<Matrix>& family, double atol = kDefaultAtol);

/// Isometry (dim x rank) whose columns span the support of a PSD matrix.
Matrix support_isometry(const Matrix& psd, double atol = kDefaultAtol);

double trace_norm(const Matrix& m);
double trace_distance(const Matrix& a, const Matrix& b);

/// Nearest positive semidefinite matrix in Frobenius norm (negative part
/// of the spectrum clipped). Idempotent.
Matrix project_to_psd_cone(const Matrix& m);

/// V†V = identity within atol.
bool is_isometry(const Matrix& v, double atol = kDefaultAtol);

bool is_unitary(const Matrix& u, double atol = kDefaultAtol);

}  // namespace kistruct
