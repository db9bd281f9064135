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

#include "kistruct/linalg.hpp"

#include <cmath>
#include <functional>

namespace kistruct {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix direct_sum(const std::vector<Matrix>& blocks) {
  Eigen::Index total = 0;
  for (const auto& b : blocks) {
    if (b.rows() != b.cols()) throw std::invalid_argument("direct_sum: blocks must be square");
    total += b.rows();
  }
  Matrix out = Matrix::Zero(total, total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.rows()) = b;
    at += b.rows();
  }
  return out;
}

Matrix partial_trace(const Matrix& m, const BipartitionDims& dims, Side side) {
  if (!dims.valid()) throw std::invalid_argument("partial_trace: invalid dims");
  if (m.rows() != m.cols() || m.rows() != dims.joint())
    throw std::invalid_argument("partial_trace: operator does not match dim_s*dim_e");
  const int ds = dims.dim_s, de = dims.dim_e;
  if (side == Side::kEnvironment) {
    Matrix out = Matrix::Zero(ds, ds);
    for (int s = 0; s < ds; ++s)
      for (int t = 0; t < ds; ++t)
        for (int e = 0; e < de; ++e) out(s, t) += m(s * de + e, t * de + e);
    return out;
  }
  Matrix out = Matrix::Zero(de, de);
  for (int e = 0; e < de; ++e)
    for (int f = 0; f < de; ++f)
      for (int s = 0; s < ds; ++s) out(e, f) += m(s * de + e, s * de + f);
  return out;
}

bool is_hermitian(const Matrix& m, double atol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= atol;
}

HermitianEig hermitian_eig(const Matrix& m, double atol) {
  if (!is_hermitian(m, atol)) throw std::invalid_argument("hermitian_eig: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

// Apply f to the spectrum of a PSD matrix; eigenvalues at or below the
// relative rank cutoff are passed to f as exact zeros.
Matrix psd_spectral_apply(const Matrix& m, double atol,
                          const std::function<cplx(double)>& f) {
  HermitianEig eig = hermitian_eig(m, atol);
  const double top = eig.values.size() ? eig.values.maxCoeff() : 0.0;
  if (eig.values.size() && eig.values.minCoeff() < -atol)
    throw std::invalid_argument("psd spectral function: negative eigenvalue beyond atol");
  const double cutoff = kSupportCutoffRel * std::max(top, 0.0);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double lam = eig.values(k) > cutoff ? eig.values(k) : 0.0;
    const cplx flam = f(lam);
    if (flam != cplx(0.0, 0.0))
      out += flam * eig.vectors.col(k) * eig.vectors.col(k).adjoint();
  }
  return out;
}

}  // namespace

Matrix psd_sqrt(const Matrix& m, double atol) {
  return psd_spectral_apply(m, atol, [](double lam) { return cplx(std::sqrt(lam), 0.0); });
}

Matrix psd_inv_sqrt_on_support(const Matrix& m, double atol) {
  return psd_spectral_apply(m, atol, [](double lam) {
    return lam > 0.0 ? cplx(1.0 / std::sqrt(lam), 0.0) : cplx(0.0, 0.0);
  });
}

Matrix psd_log_on_support(const Matrix& m, double atol) {
  return psd_spectral_apply(m, atol, [](double lam) {
    return lam > 0.0 ? cplx(std::log(lam), 0.0) : cplx(0.0, 0.0);
  });
}

Matrix psd_imaginary_power(const Matrix& m, double t, double atol) {
  return psd_spectral_apply(m, atol, [t](double lam) {
    if (lam <= 0.0) return cplx(0.0, 0.0);
    const double phase = t * std::log(lam);
    return cplx(std::cos(phase), std::sin(phase));
  });
}

Matrix support_projector_of(const Matrix& psd, double atol) {
  return psd_spectral_apply(psd, atol, [](double lam) {
    return lam > 0.0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
  });
}

Matrix support_projector(const std::vector<Matrix>& family, double atol) {
  if (family.empty()) throw std::invalid_argument("support_projector: empty family");
  const Eigen::Index dim = family.front().rows();
  Matrix avg = Matrix::Zero(dim, dim);
  for (const auto& m : family) {
    if (m.rows() != dim || m.cols() != dim)
      throw std::invalid_argument("support_projector: mixed dimensions");
    avg += m;
  }
  avg /= static_cast<double>(family.size());
  return support_projector_of(avg, atol);
}

Matrix support_isometry(const Matrix& psd, double atol) {
  HermitianEig eig = hermitian_eig(psd, atol);
  const double top = eig.values.size() ? eig.values.maxCoeff() : 0.0;
  if (eig.values.size() && eig.values.minCoeff() < -atol)
    throw std::invalid_argument("support_isometry: negative eigenvalue beyond atol");
  const double cutoff = kSupportCutoffRel * std::max(top, 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k)
    if (eig.values(k) > cutoff) keep.push_back(k);
  Matrix iso(psd.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) iso.col(c) = eig.vectors.col(keep[c]);
  return iso;
}

double trace_norm(const Matrix& m) {
  if (m.rows() == m.cols() && is_hermitian(m, 1e-10)) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
    return solver.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  return 0.5 * trace_norm(a - b);
}

Matrix project_to_psd_cone(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig((m + m.adjoint()) / 2.0);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    if (eig.eigenvalues()(k) <= 0.0) continue;
    out += eig.eigenvalues()(k) * eig.eigenvectors().col(k) * eig.eigenvectors().col(k).adjoint();
  }
  return out;
}

bool is_isometry(const Matrix& v, double atol) {
  const Matrix gram = v.adjoint() * v;
  return (gram - Matrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() <= atol;
}

bool is_unitary(const Matrix& u, double atol) {
  return u.rows() == u.cols() && is_isometry(u, atol);
}

}  // namespace kistruct
