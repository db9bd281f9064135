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

#include "kistruct/linalg.hpp"
#include "kistruct/types.hpp"

namespace kistruct {

/// Validated density operator: Hermitian within atol, eigenvalues >= -atol,
/// unit trace within atol. Immutable after construction.
class DensityOperator {
 public:
  explicit DensityOperator(Matrix m, double atol = kDefaultAtol);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double atol() const { return atol_; }

 private:
  Matrix m_;
  double atol_;
};

/// Entropy S = -tr(rho ln rho) in natural-log units.
double von_neumann_entropy(const DensityOperator& rho);

/// Embedding of a block space into an ambient space, V†V = identity.
struct Isometry {
  Matrix matrix;

  int ambient_dim() const { return static_cast<int>(matrix.rows()); }
  int block_dim() const { return static_cast<int>(matrix.cols()); }
};

/// Validating constructor; throws std::invalid_argument when V†V deviates
/// from the identity by more than atol.
Isometry make_isometry(Matrix m, double atol = kDefaultAtol);

}  // namespace kistruct
