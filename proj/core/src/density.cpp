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

#include "kistruct/density.hpp"

#include <cmath>
#include <sstream>

namespace kistruct {

DensityOperator::DensityOperator(Matrix m, double atol) : m_(std::move(m)), atol_(atol) {
  if (m_.rows() == 0 || m_.rows() != m_.cols())
    throw std::invalid_argument("DensityOperator: matrix must be square and nonempty");
  if (!m_.allFinite()) throw std::invalid_argument("DensityOperator: non-finite entries");
  if (!is_hermitian(m_, atol_))
    throw std::invalid_argument("DensityOperator: not Hermitian within atol");
  const double tr_err = std::abs(m_.trace() - cplx(1.0, 0.0));
  if (tr_err > atol_) {
    std::ostringstream msg;
    msg << "DensityOperator: trace deviates from 1 by " << tr_err;
    throw std::invalid_argument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver((m_ + m_.adjoint()) / 2.0);
  if (solver.eigenvalues().minCoeff() < -atol_) {
    std::ostringstream msg;
    msg << "DensityOperator: negative eigenvalue " << solver.eigenvalues().minCoeff();
    throw std::invalid_argument(msg.str());
  }
}

double von_neumann_entropy(const DensityOperator& rho) {
  HermitianEig eig = hermitian_eig(rho.matrix(), rho.atol());
  const double top = eig.values.maxCoeff();
  const double cutoff = kSupportCutoffRel * std::max(top, 0.0);
  double s = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double lam = eig.values(k);
    if (lam > cutoff) s -= lam * std::log(lam);
  }
  return std::max(s, 0.0);
}

Isometry make_isometry(Matrix m, double atol) {
  if (!is_isometry(m, atol)) throw std::invalid_argument("make_isometry: V†V != identity within atol");
  return Isometry{std::move(m)};
}

}  // namespace kistruct
