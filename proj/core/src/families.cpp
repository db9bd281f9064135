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

#include "kistruct/families.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kistruct/linalg.hpp"

namespace kistruct {

namespace {

Matrix hermitize(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

Matrix random_complex_matrix(int rows, int cols, SeededRng& rng) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_gaussian();
  return g;
}

// Canonical embedding of a block of size `dim` at row offset `at` inside
// C^{ambient}.
Matrix block_embedding(int ambient, int at, int dim) {
  Matrix e = Matrix::Zero(ambient, dim);
  for (int k = 0; k < dim; ++k) e(at + k, k) = 1.0;
  return e;
}

}  // namespace

DensityOperator random_density(int dim, SeededRng& rng) {
  const Matrix g = random_complex_matrix(dim, dim, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(hermitize(rho));
}

Matrix random_unitary(int dim, SeededRng& rng) {
  Matrix g = random_complex_matrix(dim, dim, rng);
  Matrix u(dim, dim);
  for (int c = 0; c < dim; ++c) {
    CVector v = g.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < c; ++k) v -= u.col(k) * u.col(k).dot(v);
    v /= v.norm();
    // fix the gauge: first nonzero entry real positive
    for (int k = 0; k < dim; ++k) {
      if (std::abs(v(k)) > 1e-12) {
        v *= std::conj(v(k)) / std::abs(v(k));
        break;
      }
    }
    u.col(c) = v;
  }
  return u;
}

std::vector<double> random_probabilities(int count, SeededRng& rng, double floor) {
  std::vector<double> p(count);
  double total = 0.0;
  for (auto& x : p) {
    x = std::max(-std::log(std::max(rng.uniform(), 1e-300)), floor * count);
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

JointStateFamily gen_product_family(int dim_s, int dim_e, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("gen_product_family: count must be >= 1");
  SeededRng rng(seed);
  const DensityOperator omega_e = random_density(dim_e, rng);
  std::vector<DensityOperator> members;
  for (int i = 0; i < count; ++i) {
    SeededRng local = rng.fork(i);
    const DensityOperator rho_s = random_density(dim_s, local);
    members.emplace_back(kron(rho_s.matrix(), omega_e.matrix()));
  }
  return make_family(BipartitionDims{dim_s, dim_e}, std::move(members));
}

JointStateFamily gen_liu_tong(const std::vector<LiuTongBlock>& blocks, int dim_e, int count,
                              std::uint64_t seed) {
  if (blocks.empty()) throw std::invalid_argument("gen_liu_tong: need at least one block");
  if (count < 1) throw std::invalid_argument("gen_liu_tong: count must be >= 1");
  SeededRng rng(seed);
  int dim_s = 0;
  for (const auto& b : blocks) dim_s += b.dim;

  // shared data: fixed joint blocks and fixed environment states
  std::vector<Matrix> fixed_parts;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    SeededRng local = rng.fork(1000 + j);
    if (blocks[j].fixed)
      fixed_parts.push_back(random_density(blocks[j].dim * dim_e, local).matrix());
    else
      fixed_parts.push_back(random_density(dim_e, local).matrix());
  }

  std::vector<DensityOperator> members;
  for (int i = 0; i < count; ++i) {
    SeededRng local = rng.fork(i);
    const auto probs = random_probabilities(static_cast<int>(blocks.size()), local);
    Matrix joint = Matrix::Zero(dim_s * dim_e, dim_s * dim_e);
    int at = 0;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      const Matrix emb = kron(block_embedding(dim_s, at, blocks[j].dim),
                              Matrix::Identity(dim_e, dim_e));
      Matrix part;
      if (blocks[j].fixed) {
        part = fixed_parts[j];
      } else {
        SeededRng state_rng = local.fork(500 + j);
        part = kron(random_density(blocks[j].dim, state_rng).matrix(), fixed_parts[j]);
      }
      joint += probs[j] * emb * part * emb.adjoint();
      at += blocks[j].dim;
    }
    members.emplace_back(hermitize(joint));
  }
  return make_family(BipartitionDims{dim_s, dim_e}, std::move(members));
}

POVMElement make_povm_element(Matrix m, double atol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("make_povm_element: matrix must be square");
  if (!is_hermitian(m, atol)) throw std::invalid_argument("make_povm_element: not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitize(m));
  if (eig.eigenvalues().minCoeff() < -atol || eig.eigenvalues().maxCoeff() > 1.0 + atol)
    throw std::invalid_argument("make_povm_element: spectrum outside [0, 1]");
  return POVMElement{static_cast<int>(m.rows()), std::move(m)};
}

POVMElement random_povm_element(int dim_a, SeededRng& rng) {
  const Matrix g = random_complex_matrix(dim_a, dim_a, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitize(g + g.adjoint()));
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double span = std::max(hi - lo, 1e-12);
  // spectrum mapped into [0.1, 0.9]: strictly inside the POVM order
  // interval, so selection probabilities stay bounded away from zero
  Matrix e = Matrix::Zero(dim_a, dim_a);
  for (int k = 0; k < dim_a; ++k) {
    const double lam = 0.1 + 0.8 * (eig.eigenvalues()(k) - lo) / span;
    e += lam * eig.eigenvectors().col(k) * eig.eigenvectors().col(k).adjoint();
  }
  return make_povm_element(hermitize(e));
}

namespace {

TripartiteState assemble_chain(const std::vector<MarkovBlockSpec>& blocks, int dim_e,
                               int dim_a2, std::uint64_t seed, bool canonical) {
  if (blocks.empty()) throw std::invalid_argument("markov chain: need at least one block");
  if (dim_e < 1) throw std::invalid_argument("markov chain: dim_e must be >= 1");
  int max_l = 0, dim_s = 0;
  for (const auto& b : blocks) {
    if (b.dim_l < 1 || b.dim_r < 1)
      throw std::invalid_argument("markov chain: block dims must be >= 1");
    max_l = std::max(max_l, b.dim_l);
    dim_s += b.dim_l * b.dim_r;
  }
  if (dim_a2 < 0) dim_a2 = max_l;
  if (dim_a2 < max_l)
    throw std::invalid_argument("markov chain: ancilla factor a2 smaller than the largest l-block");
  const int dim_a1 = static_cast<int>(blocks.size());
  const int dim_a = dim_a1 * dim_a2;

  SeededRng rng(seed);
  const auto weights = random_probabilities(dim_a1, rng);

  Matrix state = Matrix::Zero(dim_a * dim_s * dim_e, dim_a * dim_s * dim_e);
  int at = 0;
  for (int j = 0; j < dim_a1; ++j) {
    const int l = blocks[j].dim_l, r = blocks[j].dim_r;
    SeededRng local = rng.fork(j);

    Matrix a_l_part;  // on (a1 a2) ⊗ l
    if (canonical) {
      CVector phi_vec = CVector::Zero(dim_a2 * l);
      for (int k = 0; k < l; ++k) phi_vec(k * l + k) = 1.0 / std::sqrt(static_cast<double>(l));
      Matrix basis_j = Matrix::Zero(dim_a1, dim_a1);
      basis_j(j, j) = 1.0;
      a_l_part = kron(basis_j, phi_vec * phi_vec.adjoint());
    } else {
      a_l_part = random_density(dim_a * l, local).matrix();
    }
    SeededRng re_rng = local.fork(77);
    const Matrix r_e_part = random_density(r * dim_e, re_rng).matrix();

    // kron(a_l, r_e) carries index order a, l, r, e; regrouping (l r) into
    // the system slot is the embedding below.
    const Matrix term = kron(a_l_part, r_e_part);
    const Matrix emb = kron(Matrix::Identity(dim_a, dim_a),
                            kron(block_embedding(dim_s, at, l * r), Matrix::Identity(dim_e, dim_e)));
    // reorder a ⊗ l ⊗ r ⊗ e -> a ⊗ (l r) ⊗ e is the identity on indices
    state += weights[j] * emb * term * emb.adjoint();
    at += l * r;
  }
  return TripartiteState{dim_a1, dim_a2, dim_s, dim_e, blocks,
                         DensityOperator(hermitize(state))};
}

}  // namespace

TripartiteState gen_markov_chain(const std::vector<MarkovBlockSpec>& blocks, int dim_e,
                                 std::uint64_t seed, int dim_a2) {
  return assemble_chain(blocks, dim_e, dim_a2, seed, /*canonical=*/false);
}

TripartiteState canonical_markov_from_structure(const std::vector<MarkovBlockSpec>& blocks,
                                                int dim_e, std::uint64_t seed, int dim_a2) {
  return assemble_chain(blocks, dim_e, dim_a2, seed, /*canonical=*/true);
}

DensityOperator post_select(const TripartiteState& tri, const POVMElement& effect) {
  if (effect.dim_a != tri.dim_a())
    throw std::invalid_argument("post_select: effect does not act on the ancilla");
  const int dim_se = tri.dim_s * tri.dim_e;
  const Matrix weighted =
      kron(effect.matrix, Matrix::Identity(dim_se, dim_se)) * tri.state.matrix();
  const Matrix selected =
      partial_trace(weighted, BipartitionDims{tri.dim_a(), dim_se}, Side::kSystem);
  const double prob = selected.trace().real();
  if (prob <= 1e-12)
    throw PostSelectionError("post_select: selection probability vanishes");
  return DensityOperator(hermitize(selected / prob), 1e-8);
}

JointStateFamily gen_certified_random(int dim_s, int dim_e, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("gen_certified_random: count must be >= 1");
  SeededRng rng(seed);
  const auto shape = random_block_shape(dim_s, 3, rng);
  const Matrix basis = random_unitary(dim_s, rng);

  std::vector<Matrix> omegas;
  for (std::size_t j = 0; j < shape.size(); ++j) {
    SeededRng local = rng.fork(3000 + j);
    omegas.push_back(random_density(shape[j].dim_r * dim_e, local).matrix());
  }

  std::vector<DensityOperator> members;
  for (int i = 0; i < count; ++i) {
    SeededRng local = rng.fork(i);
    const auto probs = random_probabilities(static_cast<int>(shape.size()), local);
    Matrix joint = Matrix::Zero(dim_s * dim_e, dim_s * dim_e);
    int at = 0;
    for (std::size_t j = 0; j < shape.size(); ++j) {
      const int l = shape[j].dim_l, r = shape[j].dim_r;
      const Matrix emb =
          kron(basis * block_embedding(dim_s, at, l * r), Matrix::Identity(dim_e, dim_e));
      const Matrix rho_l = random_density(l, local).matrix();
      joint += probs[j] * emb * kron(rho_l, omegas[j]) * emb.adjoint();
      at += l * r;
    }
    members.emplace_back(hermitize(joint));
  }
  return make_family(BipartitionDims{dim_s, dim_e}, std::move(members));
}

JointStateFamily gen_counterexample(CounterexampleKind kind, int dim_s, int dim_e,
                                    std::uint64_t seed) {
  if (dim_s < 2 || dim_e < 2)
    throw std::invalid_argument("gen_counterexample: need dim_s >= 2 and dim_e >= 2");
  SeededRng rng(seed);
  const int dj = dim_s * dim_e;
  const auto basis_vector = [&](int s, int e) {
    CVector v = CVector::Zero(dj);
    v(s * dim_e + e) = 1.0;
    return v;
  };

  std::vector<DensityOperator> members;
  switch (kind) {
    case CounterexampleKind::kBellVsProduct: {
      const CVector bell = (basis_vector(0, 0) + basis_vector(1, 1)) / std::sqrt(2.0);
      members.emplace_back(bell * bell.adjoint());
      const CVector zero = basis_vector(0, 0);
      members.emplace_back(zero * zero.adjoint());
      break;
    }
    case CounterexampleKind::kCoherentBlocks: {
      const Matrix env_basis = random_unitary(dim_e, rng);
      CVector psi = CVector::Zero(dj);
      for (int e = 0; e < dim_e; ++e) {
        psi += env_basis(e, 0) * basis_vector(0, e) / std::sqrt(2.0);
        psi += env_basis(e, 1) * basis_vector(1, e) / std::sqrt(2.0);
      }
      members.emplace_back(psi * psi.adjoint());

      const double q = rng.uniform(0.55, 0.85);
      const Matrix omega0 = random_density(dim_e, rng).matrix();
      const Matrix omega1 = random_density(dim_e, rng).matrix();
      Matrix proj0 = Matrix::Zero(dim_s, dim_s), proj1 = Matrix::Zero(dim_s, dim_s);
      proj0(0, 0) = 1.0;
      proj1(1, 1) = 1.0;
      const Matrix mixed = q * kron(proj0, omega0) + (1.0 - q) * kron(proj1, omega1);
      members.emplace_back(hermitize(mixed));
      break;
    }
    case CounterexampleKind::kVaryingOmega: {
      const double p1 = rng.uniform(0.2, 0.4);
      const double p2 = rng.uniform(0.6, 0.8);
      const Matrix omega_a1 = random_density(dim_e, rng).matrix();
      const Matrix omega_a2 = random_density(dim_e, rng).matrix();
      const Matrix omega_b = random_density(dim_e, rng).matrix();
      Matrix proj0 = Matrix::Zero(dim_s, dim_s), proj1 = Matrix::Zero(dim_s, dim_s);
      proj0(0, 0) = 1.0;
      proj1(1, 1) = 1.0;
      members.emplace_back(hermitize(p1 * kron(proj0, omega_a1) + (1 - p1) * kron(proj1, omega_b)));
      members.emplace_back(hermitize(p2 * kron(proj0, omega_a2) + (1 - p2) * kron(proj1, omega_b)));
      break;
    }
  }
  return make_family(BipartitionDims{dim_s, dim_e}, std::move(members));
}

PlantedKiFamily gen_planted_ki(const std::vector<MarkovBlockSpec>& shape, int member_count,
                               std::uint64_t seed) {
  if (shape.empty()) throw std::invalid_argument("gen_planted_ki: empty shape");
  if (member_count < 1) throw std::invalid_argument("gen_planted_ki: need at least one member");
  SeededRng rng(seed);
  int dim = 0;
  for (const auto& b : shape) dim += b.dim_l * b.dim_r;

  PlantedKiFamily out;
  out.shape = shape;
  out.basis = random_unitary(dim, rng);

  std::vector<Matrix> omegas;
  for (std::size_t j = 0; j < shape.size(); ++j) {
    SeededRng local = rng.fork(9000 + j);
    omegas.push_back(random_density(shape[j].dim_r, local).matrix());
  }

  for (int i = 0; i < member_count; ++i) {
    SeededRng local = rng.fork(i);
    const auto probs = random_probabilities(static_cast<int>(shape.size()), local);
    Matrix rho = Matrix::Zero(dim, dim);
    int at = 0;
    for (std::size_t j = 0; j < shape.size(); ++j) {
      const int l = shape[j].dim_l, r = shape[j].dim_r;
      const Matrix emb = out.basis * block_embedding(dim, at, l * r);
      const Matrix rho_l = random_density(l, local).matrix();
      rho += probs[j] * emb * kron(rho_l, omegas[j]) * emb.adjoint();
      at += l * r;
    }
    out.members.emplace_back(hermitize(rho));
    out.probabilities.push_back(probs);
  }
  return out;
}

std::vector<MarkovBlockSpec> random_block_shape(int dim, int max_blocks, SeededRng& rng) {
  if (dim < 1) throw std::invalid_argument("random_block_shape: dim must be >= 1");
  for (int attempt = 0; attempt < 200; ++attempt) {
    SeededRng local = rng.fork(attempt);
    const int target = 1 + static_cast<int>(local.uniform_int(std::max(1, max_blocks)));
    std::vector<MarkovBlockSpec> blocks;
    int remaining = dim;
    bool ok = true;
    for (int j = 0; j + 1 < target && ok; ++j) {
      const int l = 1 + static_cast<int>(local.uniform_int(3));
      const int r = 1 + static_cast<int>(local.uniform_int(3));
      const int slots_left = target - 1 - static_cast<int>(blocks.size());
      if (l * r <= remaining - slots_left) {
        blocks.push_back({l, r});
        remaining -= l * r;
      } else {
        ok = false;
      }
    }
    if (!ok || remaining < 1) continue;
    // last block: random divisor pair of the remaining dimension
    std::vector<std::pair<int, int>> options;
    for (int l = 1; l <= remaining; ++l)
      if (remaining % l == 0) options.emplace_back(l, remaining / l);
    const auto& pick = options[local.uniform_int(options.size())];
    blocks.push_back({pick.first, pick.second});
    return blocks;
  }
  return {{1, dim}};
}

}  // namespace kistruct
