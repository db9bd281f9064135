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

#include "kistruct/cp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kistruct {

namespace {

Matrix hermitize(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

// Ambient joint embedding of block j: (support ∘ block isometry) ⊗ 1_e.
Matrix joint_block_isometry(const CPCertificate& cert, int j) {
  const Matrix system_part = cert.reduced.support_isometry * cert.reduced.blocks[j].isometry;
  return kron(system_part, Matrix::Identity(cert.dims.dim_e, cert.dims.dim_e));
}

std::vector<DensityOperator> reduced_members(const JointStateFamily& family) {
  std::vector<DensityOperator> out;
  out.reserve(family.members.size());
  for (const auto& rho : family.members)
    out.emplace_back(hermitize(partial_trace(rho.matrix(), family.dims, Side::kEnvironment)),
                     std::max(rho.atol(), 1e-9));
  return out;
}

// Shared data for repeated applications of the assignment map.
struct AssignmentContext {
  const CPCertificate& cert;
  std::vector<Matrix> system_isometries;  // ambient system -> block (l*r)
  Matrix support;                         // system-space projector
  Matrix fill;                            // joint state receiving off-support weight

  explicit AssignmentContext(const CPCertificate& c) : cert(c) {
    const int nb = c.reduced.block_count();
    for (int j = 0; j < nb; ++j)
      system_isometries.push_back(c.reduced.support_isometry * c.reduced.blocks[j].isometry);
    support = c.reduced.support;
    fill = Matrix::Zero(c.dims.joint(), c.dims.joint());
    for (int i = 0; i < c.reduced.member_count(); ++i) fill += c.reconstruct_joint(i);
    fill /= static_cast<double>(c.reduced.member_count());
  }

  Matrix apply(const Matrix& rho_s) const {
    const int dj = cert.dims.joint();
    Matrix out = Matrix::Zero(dj, dj);
    for (int j = 0; j < cert.reduced.block_count(); ++j) {
      const auto& blk = cert.reduced.blocks[j];
      const Matrix compressed = system_isometries[j].adjoint() * rho_s * system_isometries[j];
      const Matrix l_part =
          partial_trace(compressed, BipartitionDims{blk.dim_l, blk.dim_r}, Side::kEnvironment);
      const Matrix emb = kron(system_isometries[j],
                              Matrix::Identity(cert.dims.dim_e, cert.dims.dim_e));
      // The embedded operand lives on l ⊗ (r ⊗ e), which is exactly the
      // joint block ordering.
      out += emb * kron(l_part, cert.joint_omegas[j].matrix()) * emb.adjoint();
    }
    // Weight outside the family support is routed to a fixed joint state,
    // keeping the extension CP and trace-preserving without touching the
    // domain.
    const cplx leftover = rho_s.trace() - (support * rho_s).trace();
    out += leftover * fill;
    return out;
  }
};

}  // namespace

JointStateFamily make_family(BipartitionDims dims, std::vector<DensityOperator> members) {
  if (!dims.valid()) throw std::invalid_argument("make_family: invalid dims");
  if (members.empty()) throw std::invalid_argument("make_family: empty family");
  for (const auto& rho : members)
    if (rho.dim() != dims.joint())
      throw std::invalid_argument("make_family: member dimension does not match dims");
  return JointStateFamily{dims, std::move(members)};
}

Matrix CPCertificate::reconstruct_joint(int member) const {
  const int dj = dims.joint();
  Matrix out = Matrix::Zero(dj, dj);
  for (int j = 0; j < reduced.block_count(); ++j) {
    const auto& blk = reduced.blocks[j];
    const double p = reduced.probabilities[member][j];
    if (p <= 0.0) continue;
    Matrix l_part;
    if (reduced.quantum_parts[member][j])
      l_part = reduced.quantum_parts[member][j]->matrix();
    else
      l_part = Matrix::Identity(blk.dim_l, blk.dim_l) / static_cast<double>(blk.dim_l);
    const Matrix emb = kron(reduced.support_isometry * blk.isometry,
                            Matrix::Identity(dims.dim_e, dims.dim_e));
    out += emb * (p * kron(l_part, joint_omegas[j].matrix())) * emb.adjoint();
  }
  return out;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kInjectivity: return "injectivity";
    case ViolationKind::kBlockCoherence: return "block-coherence";
    case ViolationKind::kVaryingRedundantPart: return "varying-redundant-part";
  }
  return "?";
}

InjectivityCheck check_injectivity(const JointStateFamily& family, double tol) {
  InjectivityCheck out;
  const auto reduced = reduced_members(family);
  for (int i = 0; i < family.member_count(); ++i)
    for (int k = i + 1; k < family.member_count(); ++k) {
      const double joint_dist =
          trace_distance(family.members[i].matrix(), family.members[k].matrix());
      const double red_dist = trace_distance(reduced[i].matrix(), reduced[k].matrix());
      if (joint_dist > tol && red_dist <= tol) {
        out.injective = false;
        out.first = i;
        out.second = k;
        out.joint_distance = joint_dist;
        out.reduced_distance = red_dist;
        return out;
      }
    }
  return out;
}

CpDecision check_cp_guarantee(const JointStateFamily& family, std::uint64_t seed, double tol) {
  const InjectivityCheck inj = check_injectivity(family);
  if (!inj.injective) {
    std::ostringstream detail;
    detail << "members " << inj.first << " and " << inj.second
           << " share a reduced state (joint trace distance " << inj.joint_distance << ")";
    return ViolationReport{ViolationKind::kInjectivity,
                           {inj.first, inj.second},
                           -1,
                           inj.joint_distance,
                           detail.str()};
  }

  const auto reduced = reduced_members(family);
  const KIDecomposition ki = ki_decompose(reduced, seed, tol);
  const int n = family.member_count();
  const int nb = ki.block_count();
  const Matrix id_e = Matrix::Identity(family.dims.dim_e, family.dims.dim_e);

  // Cross-block joint coherences must vanish: the joint states have to be
  // block diagonal with respect to the reduced decomposition.
  for (int i = 0; i < n; ++i) {
    double worst = 0.0;
    for (int j = 0; j < nb; ++j)
      for (int k = 0; k < nb; ++k) {
        if (j == k) continue;
        const Matrix pj = kron(ki.block_projector(j), id_e);
        const Matrix pk = kron(ki.block_projector(k), id_e);
        worst = std::max(worst, (pj * family.members[i].matrix() * pk).norm());
      }
    if (worst > tol) {
      std::ostringstream detail;
      detail << "member " << i << " carries joint coherence between reduced blocks";
      return ViolationReport{ViolationKind::kBlockCoherence, {i}, -1, worst, detail.str()};
    }
  }

  // Per block: the normalized compression must factor as (reduced quantum
  // part) ⊗ (one fixed joint redundant part) for every member that puts
  // weight on the block.
  CPCertificate cert{family.dims, ki, {}};
  for (int j = 0; j < nb; ++j) {
    const auto& blk = ki.blocks[j];
    const Matrix w = kron(ki.support_isometry * blk.isometry, id_e);
    const BipartitionDims l_vs_re{blk.dim_l, blk.dim_r * family.dims.dim_e};

    int best = -1;
    std::vector<Matrix> candidates(n);
    for (int i = 0; i < n; ++i) {
      const double p = ki.probabilities[i][j];
      if (p <= kProbabilityFloor) continue;
      const Matrix t = hermitize(w.adjoint() * family.members[i].matrix() * w) / p;
      candidates[i] = hermitize(partial_trace(t, l_vs_re, Side::kSystem));
      const Matrix l_part = ki.quantum_parts[i][j]->matrix();
      const double factor_res = trace_norm(t - kron(l_part, candidates[i]));
      if (factor_res > tol) {
        std::ostringstream detail;
        detail << "member " << i << ", block " << j
               << ": joint compression does not factor as quantum ⊗ redundant";
        return ViolationReport{ViolationKind::kVaryingRedundantPart, {i}, j, factor_res,
                               detail.str()};
      }
      if (best < 0 || ki.probabilities[i][j] > ki.probabilities[best][j]) best = i;
    }
    if (best < 0)
      throw KiError("check_cp_guarantee: block carries no probability mass in any member");

    for (int i = 0; i < n; ++i) {
      if (ki.probabilities[i][j] <= kProbabilityFloor || i == best) continue;
      const double fixed_res = trace_norm(candidates[i] - candidates[best]);
      if (fixed_res > tol) {
        std::ostringstream detail;
        detail << "members " << best << " and " << i << ", block " << j
               << ": redundant joint part varies across the family";
        return ViolationReport{ViolationKind::kVaryingRedundantPart,
                               {best, i},
                               j,
                               fixed_res,
                               detail.str()};
      }
    }
    cert.joint_omegas.emplace_back(candidates[best], 1e-8);
  }
  return cert;
}

double ChoiMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitize(m));
  return eig.eigenvalues().minCoeff();
}

bool ChoiMatrix::is_cp(double atol) const { return min_eigenvalue() >= -atol; }

Matrix ChoiMatrix::apply(const Matrix& x) const {
  if (x.rows() != in_dim || x.cols() != in_dim)
    throw std::invalid_argument("ChoiMatrix::apply: input dimension mismatch");
  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (int a = 0; a < in_dim; ++a)
    for (int b = 0; b < in_dim; ++b)
      out += x(a, b) * m.block(a * out_dim, b * out_dim, out_dim, out_dim);
  return out;
}

ChoiMatrix choi_of_map(const std::function<Matrix(const Matrix&)>& phi, int in_dim, int out_dim) {
  ChoiMatrix choi{in_dim, out_dim, Matrix::Zero(in_dim * out_dim, in_dim * out_dim)};
  for (int a = 0; a < in_dim; ++a)
    for (int b = 0; b < in_dim; ++b) {
      Matrix unit = Matrix::Zero(in_dim, in_dim);
      unit(a, b) = 1.0;
      choi.m.block(a * out_dim, b * out_dim, out_dim, out_dim) = phi(unit);
    }
  return choi;
}

Matrix KrausSet::apply(const Matrix& x) const {
  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (const auto& k : operators) out += k * x * k.adjoint();
  return out;
}

double KrausSet::completeness_defect() const {
  Matrix acc = Matrix::Zero(in_dim, in_dim);
  for (const auto& k : operators) acc += k.adjoint() * k;
  return (acc - Matrix::Identity(in_dim, in_dim)).norm();
}

ChoiMatrix KrausSet::to_choi() const {
  ChoiMatrix choi{in_dim, out_dim, Matrix::Zero(in_dim * out_dim, in_dim * out_dim)};
  for (const auto& k : operators) {
    CVector w(in_dim * out_dim);
    for (int a = 0; a < in_dim; ++a)
      for (int o = 0; o < out_dim; ++o) w(a * out_dim + o) = k(o, a);
    choi.m += w * w.adjoint();
  }
  return choi;
}

Matrix assignment_apply(const CPCertificate& cert, const Matrix& rho_s) {
  if (rho_s.rows() != cert.dims.dim_s || rho_s.cols() != cert.dims.dim_s)
    throw std::invalid_argument("assignment_apply: input must live on the system space");
  return AssignmentContext(cert).apply(rho_s);
}

ChoiMatrix assignment_map(const CPCertificate& cert) {
  const AssignmentContext ctx(cert);
  return choi_of_map([&ctx](const Matrix& x) { return ctx.apply(x); }, cert.dims.dim_s,
                     cert.dims.joint());
}

KrausSet kraus_from_unitary(const CPCertificate& cert, const Matrix& u,
                            const BipartitionDims& final_dims) {
  const int dj = cert.dims.joint();
  if (u.rows() != dj || u.cols() != dj)
    throw std::invalid_argument("kraus_from_unitary: unitary does not act on the joint space");
  if (!is_unitary(u, 1e-9))
    throw std::invalid_argument("kraus_from_unitary: operator is not unitary within 1e-9");
  if (final_dims.joint() != dj)
    throw std::invalid_argument("kraus_from_unitary: final partition does not match joint dim");

  const int de = cert.dims.dim_e;
  const Matrix id_e = Matrix::Identity(de, de);

  // A = Σ_j Π_j ω_{r_j e}^{1/2} ω_{r_j}^{-1/2}; on each block this is
  // 1_l ⊗ ω_{je}^{1/2} (ω_j^{-1/2} ⊗ 1_e). The reduction to the family
  // support makes every ω_{r_j} full rank on its r-factor.
  Matrix a_op = Matrix::Zero(dj, dj);
  for (int j = 0; j < cert.reduced.block_count(); ++j) {
    const auto& blk = cert.reduced.blocks[j];
    const Matrix omega_r = hermitize(partial_trace(
        cert.joint_omegas[j].matrix(), BipartitionDims{blk.dim_r, de}, Side::kEnvironment));
    const Matrix omega_r_isqrt = psd_inv_sqrt_on_support(omega_r, 1e-8);
    if ((omega_r_isqrt * omega_r * omega_r_isqrt - Matrix::Identity(blk.dim_r, blk.dim_r)).norm() >
        1e-6)
      throw std::runtime_error(
          "kraus_from_unitary: redundant part is rank deficient after support reduction");
    const Matrix block_op = kron(Matrix::Identity(blk.dim_l, blk.dim_l),
                                 psd_sqrt(cert.joint_omegas[j].matrix(), 1e-8) *
                                     kron(omega_r_isqrt, id_e));
    const Matrix w = kron(cert.reduced.support_isometry * blk.isometry, id_e);
    a_op += w * block_op * w.adjoint();
  }
  // Off-support completion: send the unused part of the system space to a
  // fixed environment basis state so that Σ K†K = 1 on all of H_s.
  const Matrix ground = [&] {
    Matrix g = Matrix::Zero(de, de);
    g(0, 0) = 1.0;
    return g;
  }();
  a_op += kron(Matrix::Identity(cert.dims.dim_s, cert.dims.dim_s) - cert.reduced.support, ground);

  KrausSet out{cert.dims.dim_s, final_dims.dim_s, {}};
  for (int beta = 0; beta < de; ++beta) {
    Matrix column_selector = Matrix::Zero(de, 1);
    column_selector(beta, 0) = 1.0;
    const Matrix m_beta =
        u * a_op * kron(Matrix::Identity(cert.dims.dim_s, cert.dims.dim_s), column_selector);
    for (int alpha = 0; alpha < final_dims.dim_e; ++alpha) {
      Matrix k(final_dims.dim_s, cert.dims.dim_s);
      for (int sp = 0; sp < final_dims.dim_s; ++sp)
        k.row(sp) = m_beta.row(sp * final_dims.dim_e + alpha);
      out.operators.push_back(std::move(k));
    }
  }
  return out;
}

Matrix reduced_dynamics_member(const JointStateFamily& family, const Matrix& u,
                               const BipartitionDims& final_dims, int member) {
  if (member < 0 || member >= family.member_count())
    throw std::invalid_argument("reduced_dynamics_member: member index out of range");
  if (final_dims.joint() != family.dims.joint())
    throw std::invalid_argument("reduced_dynamics_member: partition mismatch");
  const Matrix evolved = u * family.members[member].matrix() * u.adjoint();
  return partial_trace(evolved, final_dims, Side::kEnvironment);
}

Matrix reduced_dynamics_extended(const CPCertificate& cert, const Matrix& u,
                                 const BipartitionDims& final_dims, const Matrix& rho_s) {
  if (final_dims.joint() != cert.dims.joint())
    throw std::invalid_argument("reduced_dynamics_extended: partition mismatch");
  const Matrix joint = assignment_apply(cert, rho_s);
  return partial_trace(u * joint * u.adjoint(), final_dims, Side::kEnvironment);
}

double mutual_information(const DensityOperator& joint, const BipartitionDims& dims) {
  if (joint.dim() != dims.joint())
    throw std::invalid_argument("mutual_information: dims do not match the state");
  const DensityOperator rho_s(hermitize(partial_trace(joint.matrix(), dims, Side::kEnvironment)),
                              1e-8);
  const DensityOperator rho_e(hermitize(partial_trace(joint.matrix(), dims, Side::kSystem)), 1e-8);
  return von_neumann_entropy(rho_s) + von_neumann_entropy(rho_e) - von_neumann_entropy(joint);
}

double mutual_information_structured(const CPCertificate& cert, int member) {
  if (member < 0 || member >= cert.reduced.member_count())
    throw std::invalid_argument("mutual_information_structured: member index out of range");
  const int de = cert.dims.dim_e;
  Matrix rho_e = Matrix::Zero(de, de);
  double acc = 0.0;
  for (int j = 0; j < cert.reduced.block_count(); ++j) {
    const double p = cert.reduced.probabilities[member][j];
    const auto& omega_je = cert.joint_omegas[j];
    const BipartitionDims r_vs_e{cert.reduced.blocks[j].dim_r, de};
    rho_e += p * partial_trace(omega_je.matrix(), r_vs_e, Side::kSystem);
    if (p <= 0.0) continue;
    const DensityOperator omega_r(
        hermitize(partial_trace(omega_je.matrix(), r_vs_e, Side::kEnvironment)), 1e-8);
    acc += p * (von_neumann_entropy(omega_r) - von_neumann_entropy(omega_je));
  }
  return von_neumann_entropy(DensityOperator(hermitize(rho_e), 1e-8)) + acc;
}

}  // namespace kistruct
