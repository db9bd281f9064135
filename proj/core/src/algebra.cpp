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

#include "kistruct/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "kistruct/linalg.hpp"
#include "kistruct/rng.hpp"

namespace kistruct {

namespace {

CVector vec(const Matrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

Matrix unvec(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

// Orthonormal basis of a matrix subspace under the trace inner product,
// grown one candidate at a time by two-pass Gram-Schmidt.
class OrthoBasis {
 public:
  explicit OrthoBasis(Eigen::Index dim) : dim_(dim), q_(dim * dim, 0) {}

  // Returns true when the candidate added a new direction (relative
  // residual above tol).
  bool add(const Matrix& candidate, double tol) {
    const double scale = candidate.norm();
    if (!(scale > 0.0) || !candidate.allFinite()) return false;
    CVector v = vec(candidate);
    if (q_.cols() > 0) {
      v -= q_ * (q_.adjoint() * v);
      v -= q_ * (q_.adjoint() * v);
    }
    if (v.norm() <= tol * scale) return false;
    v /= v.norm();
    q_.conservativeResize(Eigen::NoChange, q_.cols() + 1);
    q_.col(q_.cols() - 1) = v;
    mats_.push_back(unvec(v, dim_, dim_));
    return true;
  }

  Eigen::Index size() const { return q_.cols(); }
  const std::vector<Matrix>& matrices() const { return mats_; }
  std::vector<Matrix> take() { return std::move(mats_); }

 private:
  Eigen::Index dim_;
  Matrix q_;
  std::vector<Matrix> mats_;
};

// Split an ascending spectrum into clusters at relative gaps. A spread
// below the noise floor is a single cluster.
std::vector<std::pair<int, int>> cluster_spectrum(const RealVector& vals, double rel_gap) {
  std::vector<std::pair<int, int>> clusters;
  const int n = static_cast<int>(vals.size());
  if (n == 0) return clusters;
  const double spread = vals(n - 1) - vals(0);
  const double scale = std::max(1.0, std::abs(vals.cwiseAbs().maxCoeff()));
  if (spread <= 1e-9 * scale) {
    clusters.emplace_back(0, n);
    return clusters;
  }
  const double threshold = rel_gap * spread;
  int start = 0;
  for (int k = 1; k < n; ++k) {
    if (vals(k) - vals(k - 1) > threshold) {
      clusters.emplace_back(start, k - start);
      start = k;
    }
  }
  clusters.emplace_back(start, n - start);
  return clusters;
}

// Random Hermitian element of the span of a (not necessarily Hermitian)
// basis.
Matrix random_hermitian_element(const std::vector<Matrix>& basis, SeededRng& rng) {
  const Eigen::Index d = basis.front().rows();
  Matrix h = Matrix::Zero(d, d);
  for (const auto& b : basis) {
    const Matrix sym = (b + b.adjoint()) / 2.0;
    const Matrix asym = (b - b.adjoint()) / cplx(0.0, 2.0);
    h += rng.gaussian() * sym + rng.gaussian() * asym;
  }
  return (h + h.adjoint()) / 2.0;
}

// Partial trace over the r-factor of an (l*r)x(l*r) matrix in l-major
// ordering, scaled to the best-fit coefficient of c ⊗ 1_r.
Matrix fit_l_coefficient(const Matrix& m, int dim_l, int dim_r) {
  Matrix c = Matrix::Zero(dim_l, dim_l);
  for (int k = 0; k < dim_l; ++k)
    for (int kp = 0; kp < dim_l; ++kp) {
      cplx acc = 0.0;
      for (int i = 0; i < dim_r; ++i) acc += m(k * dim_r + i, kp * dim_r + i);
      c(k, kp) = acc / static_cast<double>(dim_r);
    }
  return c;
}

struct BlockFactorization {
  Matrix change_of_basis;  // m x m unitary, columns in l-major (l, r) order
  int dim_l = 0;
  int dim_r = 0;
};

// Tensor factorization of one central block: find a basis of the block in
// which the compressed algebra acts as B(l) ⊗ 1_r. The compressed algebra
// is a factor, so a generic Hermitian element has dim_l distinct
// eigenvalues of multiplicity dim_r; partial isometries between the
// spectral subspaces assemble the l-factor coordinates.
std::optional<BlockFactorization> factor_block(const std::vector<Matrix>& compressed_basis,
                                               Eigen::Index m, SeededRng rng) {
  const int algebra_dim = static_cast<int>(compressed_basis.size());
  for (int attempt = 0; attempt < 8; ++attempt) {
    SeededRng local = rng.fork(attempt);
    const Matrix h = random_hermitian_element(compressed_basis, local);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    const auto clusters = cluster_spectrum(eig.eigenvalues(), 1e-6);
    const int dim_l = static_cast<int>(clusters.size());
    const int dim_r = clusters.front().second;
    bool uniform = true;
    for (const auto& c : clusters) uniform = uniform && (c.second == dim_r);
    if (!uniform || dim_l * dim_r != static_cast<int>(m)) continue;
    if (dim_l * dim_l != algebra_dim) continue;

    std::vector<Matrix> spectral(dim_l);
    for (int k = 0; k < dim_l; ++k)
      spectral[k] = eig.eigenvectors().middleCols(clusters[k].first, dim_r);

    Matrix t(m, m);
    t.leftCols(dim_r) = spectral[0];
    bool ok = true;
    for (int k = 1; k < dim_l && ok; ++k) {
      // Partial isometry from the first spectral subspace to the k-th,
      // taken as the polar part of Q_k g Q_0 for a generic algebra element.
      bool found = false;
      for (int g_try = 0; g_try < 8 && !found; ++g_try) {
        SeededRng g_rng = local.fork(100 + k * 16 + g_try);
        const Matrix g = random_hermitian_element(compressed_basis, g_rng);
        const Matrix cross = spectral[k].adjoint() * g * spectral[0];
        Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        if (smin <= 1e-8 * std::max(smax, 1.0)) continue;
        t.middleCols(k * dim_r, dim_r) = spectral[k] * (svd.matrixU() * svd.matrixV().adjoint());
        found = true;
      }
      ok = found;
    }
    if (!ok) continue;

    // Certify: every compressed basis element must become c ⊗ 1_r.
    double worst = 0.0;
    for (const auto& b : compressed_basis) {
      const Matrix in_basis = t.adjoint() * b * t;
      const Matrix c = fit_l_coefficient(in_basis, dim_l, dim_r);
      const double res = (in_basis - kron(c, Matrix::Identity(dim_r, dim_r))).norm();
      worst = std::max(worst, res / std::max(b.norm(), 1e-300));
    }
    if (worst > 1e-8) continue;
    return BlockFactorization{t, dim_l, dim_r};
  }
  return std::nullopt;
}

bool fingerprint_less(const Matrix& a, const Matrix& b) {
  const auto key = [](double x) { return std::llround(x / 1e-6); };
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const auto ra = key(a(i, j).real()), rb = key(b(i, j).real());
      if (ra != rb) return ra < rb;
      const auto ia = key(a(i, j).imag()), ib = key(b(i, j).imag());
      if (ia != ib) return ia < ib;
    }
  return false;
}

}  // namespace

int BlockStructure::total_dim() const {
  int total = 0;
  for (const auto& b : blocks) total += b.dim_l * b.dim_r;
  return total;
}

double span_residual(const std::vector<Matrix>& basis, const Matrix& candidate) {
  const double scale = candidate.norm();
  if (!(scale > 0.0)) return 0.0;
  CVector v = vec(candidate);
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) {
      const CVector bv = vec(b);
      v -= bv * bv.dot(v);
    }
  return v.norm() / scale;
}

StarAlgebra close_star_algebra(const std::vector<Matrix>& generators, double tol) {
  if (generators.empty())
    throw std::invalid_argument("close_star_algebra: need at least one generator");
  const Eigen::Index d = generators.front().rows();
  for (const auto& g : generators)
    if (g.rows() != d || g.cols() != d)
      throw std::invalid_argument("close_star_algebra: generators must be square, common dimension");

  OrthoBasis basis(d);
  basis.add(Matrix::Identity(d, d), tol);
  for (const auto& g : generators) {
    basis.add(g, tol);
    basis.add(g.adjoint(), tol);
  }

  // Sweep all pair products until a fixed point; each sweep can only add
  // directions, and the span dimension is bounded by d^2.
  bool changed = true;
  while (changed) {
    changed = false;
    const std::vector<Matrix> snapshot = basis.matrices();
    for (const auto& lhs : snapshot)
      for (const auto& rhs : snapshot) {
        const Matrix p = lhs * rhs;
        if (basis.add(p, tol)) {
          basis.add(p.adjoint(), tol);
          changed = true;
        }
      }
  }
  return StarAlgebra{static_cast<int>(d), basis.take()};
}

StarAlgebra commutant(const StarAlgebra& a) {
  const int d = a.ambient_dim;
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  const Matrix id = Matrix::Identity(d, d);

  // vec(BX - XB) = (1 ⊗ B - Bᵀ ⊗ 1) vec(X); accumulate the PSD Gram
  // operator of all commutation constraints and read off its null space.
  Matrix gram = Matrix::Zero(n, n);
  for (const auto& b : a.basis) {
    const Matrix t = kron(id, b) - kron(b.transpose(), id);
    gram += t.adjoint() * t;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig((gram + gram.adjoint()) / 2.0);
  const double top = std::max(eig.eigenvalues().maxCoeff(), 1.0);

  std::vector<Matrix> out;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (eig.eigenvalues()(k) > 1e-12 * top) continue;
    out.push_back(unvec(eig.eigenvectors().col(k), d, d));
  }

  // The null space of the Gram operator is the commutant; certify the
  // commutation residual directly.
  for (const auto& x : out)
    for (const auto& b : a.basis)
      if ((x * b - b * x).norm() > 1e-9 * std::max(1.0, b.norm()))
        throw DecompositionError("commutant: null-space element fails the commutation bound");
  return StarAlgebra{d, std::move(out)};
}

StarAlgebra algebra_center(const StarAlgebra& a) {
  const StarAlgebra prime = commutant(a);
  const int d = a.ambient_dim;
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;

  Matrix qa(n, a.basis.size());
  for (std::size_t k = 0; k < a.basis.size(); ++k) qa.col(k) = vec(a.basis[k]);
  Matrix qc(n, prime.basis.size());
  for (std::size_t k = 0; k < prime.basis.size(); ++k) qc.col(k) = vec(prime.basis[k]);

  // Intersection of the two spans: eigenvalue-2 eigenspace of the sum of
  // the orthogonal projectors.
  const Matrix s = qa * qa.adjoint() + qc * qc.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> eig((s + s.adjoint()) / 2.0);
  std::vector<Matrix> out;
  for (Eigen::Index k = 0; k < n; ++k)
    if (eig.eigenvalues()(k) >= 2.0 - 1e-8)
      out.push_back(unvec(eig.eigenvectors().col(k), d, d));
  return StarAlgebra{d, std::move(out)};
}

BlockStructure decompose_algebra(const StarAlgebra& a, std::uint64_t seed) {
  const int d = a.ambient_dim;
  if (a.basis.empty()) throw std::invalid_argument("decompose_algebra: empty algebra");
  if (span_residual(a.basis, Matrix::Identity(d, d)) > 1e-8)
    throw std::invalid_argument("decompose_algebra: identity not contained in the algebra");

  const StarAlgebra prime = commutant(a);
  const StarAlgebra center = algebra_center(a);
  const int n_blocks = center.dim();

  std::ostringstream diag;
  for (int attempt = 0; attempt < 6; ++attempt) {
    SeededRng rng = SeededRng(seed).fork(attempt);

    // A generic Hermitian central element separates the blocks: one
    // eigenvalue cluster per minimal central projection.
    const Matrix z = random_hermitian_element(center.basis, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(z);
    const auto clusters = cluster_spectrum(eig.eigenvalues(), 1e-6);
    if (static_cast<int>(clusters.size()) != n_blocks) {
      diag << "attempt " << attempt << ": central element produced " << clusters.size()
           << " clusters, center dimension is " << n_blocks << "; ";
      continue;
    }

    std::vector<AlgebraBlock> blocks;
    bool ok = true;
    for (const auto& [first, count] : clusters) {
      const Matrix w = eig.eigenvectors().middleCols(first, count);
      OrthoBasis compressed(count);
      for (const auto& b : a.basis) compressed.add(w.adjoint() * b * w, 1e-10);
      auto factor = factor_block(compressed.matrices(), count, rng.fork(1000 + first));
      if (!factor) {
        diag << "attempt " << attempt << ": block of dimension " << count
             << " failed tensor factorization; ";
        ok = false;
        break;
      }
      blocks.push_back(AlgebraBlock{w * factor->change_of_basis, factor->dim_l, factor->dim_r});
    }
    if (!ok) continue;

    // Dimension bookkeeping must be exact: dim A = Σ l², dim A' = Σ r².
    int sum_lr = 0, sum_l2 = 0, sum_r2 = 0;
    for (const auto& b : blocks) {
      sum_lr += b.dim_l * b.dim_r;
      sum_l2 += b.dim_l * b.dim_l;
      sum_r2 += b.dim_r * b.dim_r;
    }
    if (sum_lr != d || sum_l2 != a.dim() || sum_r2 != prime.dim()) {
      diag << "attempt " << attempt << ": dimension bookkeeping mismatch (" << sum_lr << ","
           << sum_l2 << "," << sum_r2 << ") vs (" << d << "," << a.dim() << "," << prime.dim()
           << "); ";
      continue;
    }

    std::sort(blocks.begin(), blocks.end(), [](const AlgebraBlock& x, const AlgebraBlock& y) {
      if (x.dim_l != y.dim_l) return x.dim_l < y.dim_l;
      if (x.dim_r != y.dim_r) return x.dim_r < y.dim_r;
      return fingerprint_less(x.isometry, y.isometry);
    });
    BlockStructure structure{d, std::move(blocks)};

    double worst = 0.0;
    for (const auto& b : a.basis) {
      const auto fit = project_onto_structure(structure, b);
      worst = std::max(worst, fit.residual / std::max(b.norm(), 1e-300));
    }
    if (worst > 1e-8) {
      diag << "attempt " << attempt << ": global reconstruction residual " << worst << "; ";
      continue;
    }
    return structure;
  }
  throw DecompositionError("decompose_algebra: could not certify a block structure: " + diag.str());
}

BlockCoefficients project_onto_structure(const BlockStructure& s, const Matrix& b) {
  BlockCoefficients out;
  Matrix recon = Matrix::Zero(b.rows(), b.cols());
  for (const auto& block : s.blocks) {
    const Matrix compressed = block.isometry.adjoint() * b * block.isometry;
    Matrix c = fit_l_coefficient(compressed, block.dim_l, block.dim_r);
    recon += block.isometry * kron(c, Matrix::Identity(block.dim_r, block.dim_r)) *
             block.isometry.adjoint();
    out.l_parts.push_back(std::move(c));
  }
  out.residual = (b - recon).norm();
  return out;
}

}  // namespace kistruct
