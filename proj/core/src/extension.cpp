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

#include "kistruct/extension.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "kistruct/linalg.hpp"
#include "kistruct/log.hpp"
#include "kistruct/rng.hpp"

namespace kistruct {

namespace {

Matrix hermitize(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

double min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitize(m));
  return eig.eigenvalues().minCoeff();
}

cplx hs_inner(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace(); }

// Orthonormal basis of the input span with the matching forced images,
// carried through the Gram-Schmidt bookkeeping.
struct SpanBasis {
  std::vector<Matrix> inputs;  // orthonormal under the trace inner product
  std::vector<Matrix> images;  // forced image of each basis element
};

SpanBasis orthonormalize_pairs(const MapOnStates& m) {
  SpanBasis out;
  for (const auto& [rho, sigma] : m.pairs) {
    Matrix r = rho;
    Matrix img = sigma;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < out.inputs.size(); ++k) {
        const cplx c = hs_inner(out.inputs[k], r);
        r -= c * out.inputs[k];
        img -= c * out.images[k];
      }
    const double norm = r.norm();
    if (norm <= 1e-9 * std::max(rho.norm(), 1.0)) continue;  // dependent input
    out.inputs.push_back(r / norm);
    out.images.push_back(img / norm);
  }
  return out;
}

}  // namespace

MapOnStates make_map_on_states(int in_dim, int out_dim,
                               std::vector<std::pair<Matrix, Matrix>> pairs) {
  if (in_dim < 1 || out_dim < 1)
    throw std::invalid_argument("make_map_on_states: dimensions must be positive");
  if (pairs.empty()) throw std::invalid_argument("make_map_on_states: no pairs");
  for (const auto& [rho, sigma] : pairs) {
    if (rho.rows() != in_dim || rho.cols() != in_dim)
      throw std::invalid_argument("make_map_on_states: input dimension mismatch");
    if (sigma.rows() != out_dim || sigma.cols() != out_dim)
      throw std::invalid_argument("make_map_on_states: output dimension mismatch");
  }
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t k = i + 1; k < pairs.size(); ++k)
      if (trace_distance(pairs[i].first, pairs[k].first) <= 1e-9)
        throw std::invalid_argument("make_map_on_states: inputs must be pairwise distinct");

  // Linear consistency: every dependency among the inputs must be matched
  // by the outputs. Check the image of each input against the span basis.
  MapOnStates m{in_dim, out_dim, std::move(pairs)};
  const SpanBasis basis = orthonormalize_pairs(m);
  for (const auto& [rho, sigma] : m.pairs) {
    Matrix r = rho;
    Matrix img = sigma;
    for (std::size_t k = 0; k < basis.inputs.size(); ++k) {
      const cplx c = hs_inner(basis.inputs[k], r);
      r -= c * basis.inputs[k];
      img -= c * basis.images[k];
    }
    if (r.norm() <= 1e-9 && img.norm() > 1e-8)
      throw std::invalid_argument(
          "make_map_on_states: inconsistent data (input dependency not matched by outputs)");
  }
  return m;
}

MapOnStates map_from_family(const JointStateFamily& family, const Matrix& u,
                            const BipartitionDims& final_dims) {
  std::vector<std::pair<Matrix, Matrix>> pairs;
  for (int i = 0; i < family.member_count(); ++i) {
    const Matrix rho_s =
        hermitize(partial_trace(family.members[i].matrix(), family.dims, Side::kEnvironment));
    const Matrix out = hermitize(reduced_dynamics_member(family, u, final_dims, i));
    bool duplicate = false;
    for (const auto& [seen, seen_out] : pairs) {
      if (trace_distance(seen, rho_s) <= 1e-9) {
        if (trace_distance(seen_out, out) > 1e-8)
          throw std::invalid_argument(
              "map_from_family: equal reduced states with different evolved states");
        duplicate = true;
        break;
      }
    }
    if (!duplicate) pairs.emplace_back(rho_s, out);
  }
  return make_map_on_states(family.dims.dim_s, final_dims.dim_s, std::move(pairs));
}

std::optional<ExtensionWitness> linear_extension_witness(const MapOnStates& m,
                                                         std::uint64_t seed) {
  const int n = static_cast<int>(m.pairs.size());
  const auto combine = [&](const std::vector<double>& c) {
    Matrix x = Matrix::Zero(m.in_dim, m.in_dim);
    Matrix f = Matrix::Zero(m.out_dim, m.out_dim);
    for (int i = 0; i < n; ++i) {
      x += c[i] * m.pairs[i].first;
      f += c[i] * m.pairs[i].second;
    }
    return std::make_pair(hermitize(x), hermitize(f));
  };

  std::optional<ExtensionWitness> best;
  const auto consider = [&](const std::vector<double>& c) {
    const auto [x, f] = combine(c);
    if (min_eig(x) < -1e-10) return;
    const double lam = min_eig(f);
    if (lam < -1e-8 && (!best || lam < best->min_eigenvalue))
      best = ExtensionWitness{x, f, lam};
  };

  // Walk to the PSD boundary along base + t*dir (dir coefficients sum to
  // zero, so the affine constraint is preserved for every t).
  const auto probe = [&](const std::vector<double>& base, const std::vector<double>& dir) {
    const auto at = [&](double t) {
      std::vector<double> c(n);
      for (int i = 0; i < n; ++i) c[i] = base[i] + t * dir[i];
      return c;
    };
    const auto psd_at = [&](double t) {
      const auto [x, f] = combine(at(t));
      (void)f;
      return min_eig(x) >= -1e-12 * std::max(1.0, x.norm());
    };
    if (!psd_at(0.0)) return;
    double lo = 0.0, hi = 1.0;
    while (psd_at(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) return;  // would need a PSD direction, impossible for traceless dir
    }
    for (int it = 0; it < 80; ++it) {
      const double mid = (lo + hi) / 2.0;
      (psd_at(mid) ? lo : hi) = mid;
    }
    consider(at(lo));
  };

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> base(n, 0.0), dir(n, 0.0);
      base[i] = 1.0;
      dir[i] = -1.0;
      dir[j] = 1.0;
      probe(base, dir);
    }

  SeededRng rng(seed);
  const std::vector<double> centroid(n, 1.0 / n);
  for (int draw = 0; draw < 24; ++draw) {
    SeededRng local = rng.fork(draw);
    std::vector<double> dir(n);
    double mean = 0.0;
    for (auto& d : dir) {
      d = local.gaussian();
      mean += d;
    }
    mean /= n;
    for (auto& d : dir) d -= mean;
    probe(centroid, dir);
    for (auto& d : dir) d = -d;
    probe(centroid, dir);
  }
  return best;
}

FeasibilityResult cp_feasibility(const MapOnStates& m, int max_iter, double tol) {
  const SpanBasis basis = orthonormalize_pairs(m);
  const int nb = static_cast<int>(basis.inputs.size());
  const int dim = m.in_dim * m.out_dim;

  // With an orthonormal input basis the constraint functionals
  // L_k(J) = tr_in[J (B_kᵀ ⊗ 1)] have orthonormal adjoints
  // L_k*(Y) = conj(B_k) ⊗ Y, so the affine projection is a closed-form
  // correction and satisfies the constraints exactly.
  const auto constraint_value = [&](const Matrix& j, int k) {
    Matrix out = Matrix::Zero(m.out_dim, m.out_dim);
    for (int a = 0; a < m.in_dim; ++a)
      for (int b = 0; b < m.in_dim; ++b)
        out += basis.inputs[k](a, b) * j.block(a * m.out_dim, b * m.out_dim, m.out_dim, m.out_dim);
    return out;
  };
  const auto project_affine = [&](Matrix j) {
    for (int k = 0; k < nb; ++k) {
      const Matrix defect = basis.images[k] - constraint_value(j, k);
      const Matrix correction = kron(basis.inputs[k].conjugate(), defect);
      j += correction;
    }
    return hermitize(j);
  };
  FeasibilityResult result;
  Matrix x = project_affine(Matrix::Zero(dim, dim));
  Matrix correction = Matrix::Zero(dim, dim);

  std::deque<double> gap_window;
  constexpr int kWindow = 500;
  for (int iter = 1; iter <= max_iter; ++iter) {
    result.iterations = iter;
    if (min_eig(x) >= -tol) {
      result.status = FeasibilityStatus::kFeasible;
      result.choi = ChoiMatrix{m.in_dim, m.out_dim, x};
      result.gap = 0.0;
      return result;
    }
    const Matrix y = project_to_psd_cone(x + correction);
    correction = x + correction - y;
    x = project_affine(y);

    const double gap = (x - y).norm();
    result.gap = gap;
    gap_window.push_back(gap);
    if (static_cast<int>(gap_window.size()) > kWindow) {
      const double old = gap_window.front();
      gap_window.pop_front();
      const double rel_change = std::abs(gap - old) / std::max(old, 1e-300);
      if (rel_change < 1e-4 && gap >= 10.0 * tol) {
        result.status = FeasibilityStatus::kInfeasible;
        log_message(LogLevel::kDebug,
                    "cp_feasibility: gap stalled at " + std::to_string(gap) + " after " +
                        std::to_string(iter) + " iterations");
        return result;
      }
    }
  }
  result.status = FeasibilityStatus::kUndecided;
  return result;
}

}  // namespace kistruct
