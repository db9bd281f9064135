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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kistruct/cp.hpp"
#include "kistruct/families.hpp"
#include "kistruct/linalg.hpp"
#include "support/test_helpers.hpp"

using namespace kistruct;
using namespace kistruct::testing;

namespace {

JointStateFamily bell_vs_product() {
  return gen_counterexample(CounterexampleKind::kBellVsProduct, 2, 2, 1);
}

CPCertificate certify(const JointStateFamily& family, std::uint64_t seed = 3) {
  const CpDecision decision = check_cp_guarantee(family, seed);
  REQUIRE(std::holds_alternative<CPCertificate>(decision));
  return std::get<CPCertificate>(decision);
}

Matrix swap_unitary(int d1, int d2) {
  Matrix u = Matrix::Zero(d1 * d2, d1 * d2);
  for (int a = 0; a < d1; ++a)
    for (int b = 0; b < d2; ++b) u(b * d1 + a, a * d2 + b) = 1.0;
  return u;
}

}  // namespace

TEST_CASE("injectivity holds for product families and singletons") {
  const JointStateFamily fam = gen_product_family(2, 2, 3, 7);
  CHECK(check_injectivity(fam).injective);
  SeededRng rng(9);
  std::vector<DensityOperator> single{random_density(4, rng)};
  CHECK(check_injectivity(make_family({2, 2}, std::move(single))).injective);
}

TEST_CASE("Bell state and the maximally mixed state break injectivity") {
  std::vector<DensityOperator> members{DensityOperator(bell_state()),
                                       DensityOperator(Matrix::Identity(4, 4) / 4.0)};
  const JointStateFamily fam = make_family({2, 2}, std::move(members));
  const InjectivityCheck check = check_injectivity(fam);
  CHECK_FALSE(check.injective);
  CHECK(check.reduced_distance <= 1e-9);
  CHECK(check.joint_distance > 0.1);

  const CpDecision decision = check_cp_guarantee(fam, 3);
  REQUIRE(std::holds_alternative<ViolationReport>(decision));
  CHECK(std::get<ViolationReport>(decision).condition == ViolationKind::kInjectivity);
}

TEST_CASE("singleton family certifies with a single redundant block") {
  SeededRng rng(11);
  std::vector<DensityOperator> members{random_density(4, rng)};
  const JointStateFamily fam = make_family({2, 2}, std::move(members));
  const CPCertificate cert = certify(fam);
  CHECK(cert.reduced.block_count() == 1);
  CHECK(cert.reduced.blocks[0].dim_l == 1);
  // omega_{re} is the joint state itself (up to the support gauge)
  CHECK(trace_norm(cert.reconstruct_joint(0) - fam.members[0].matrix()) < 1e-9);
}

TEST_CASE("product families certify and reconstruct") {
  const JointStateFamily fam = gen_product_family(3, 2, 4, 23);
  const CPCertificate cert = certify(fam);
  for (int i = 0; i < fam.member_count(); ++i)
    CHECK(trace_norm(cert.reconstruct_joint(i) - fam.members[i].matrix()) <= 1e-8);
  CHECK(trace_norm(partial_trace(cert.joint_omegas[0].matrix(),
                                 {cert.reduced.blocks[0].dim_r, 2}, Side::kEnvironment) -
                   cert.reduced.blocks[0].omega.matrix()) <= 1e-9);
}

TEST_CASE("liu-tong families certify with the planted block dimensions") {
  const JointStateFamily fam = gen_liu_tong({{2, true}, {2, false}}, 2, 4, 31);
  const CPCertificate cert = certify(fam);
  std::vector<std::pair<int, int>> dims;
  for (const auto& b : cert.reduced.blocks) dims.emplace_back(b.dim_l, b.dim_r);
  std::sort(dims.begin(), dims.end());
  CHECK(dims == std::vector<std::pair<int, int>>{{1, 2}, {2, 1}});
}

TEST_CASE("bell-vs-product is rejected with a coherence of one half") {
  const CpDecision decision = check_cp_guarantee(bell_vs_product(), 3);
  REQUIRE(std::holds_alternative<ViolationReport>(decision));
  const auto& report = std::get<ViolationReport>(decision);
  CHECK(report.condition == ViolationKind::kBlockCoherence);
  CHECK(report.magnitude == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("assignment map of a product certificate is rho ⊗ omega") {
  const JointStateFamily fam = gen_product_family(2, 2, 3, 41);
  const CPCertificate cert = certify(fam);
  const Matrix omega_e = partial_trace(fam.members[0].matrix(), fam.dims, Side::kSystem);
  SeededRng rng(43);
  const Matrix probe = random_density(2, rng).matrix();
  CHECK(trace_norm(assignment_apply(cert, probe) - kron(probe, omega_e)) <= 1e-9);

  const ChoiMatrix choi = assignment_map(cert);
  CHECK(choi.min_eigenvalue() >= -1e-9);
}

TEST_CASE("assignment map reproduces members and is CP and trace preserving") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const JointStateFamily fam = gen_certified_random(4, 2, 3, seed);
    const CPCertificate cert = certify(fam, seed);
    const ChoiMatrix choi = assignment_map(cert);
    CHECK(choi.min_eigenvalue() >= -1e-9);
    for (int i = 0; i < fam.member_count(); ++i) {
      const Matrix rho_s = partial_trace(fam.members[i].matrix(), fam.dims, Side::kEnvironment);
      CHECK(trace_norm(choi.apply(rho_s) - fam.members[i].matrix()) <= 1e-8);
      CHECK(trace_norm(partial_trace(assignment_apply(cert, rho_s), fam.dims,
                                     Side::kEnvironment) -
                       rho_s) <= 1e-8);
    }
    // trace preservation on arbitrary input
    SeededRng rng(seed + 100);
    const Matrix probe = random_density(4, rng).matrix();
    CHECK(std::abs(assignment_apply(cert, probe).trace().real() - 1.0) <= 1e-9);
  }
}

TEST_CASE("kraus set from the identity unitary reproduces the members") {
  const JointStateFamily fam = gen_certified_random(3, 2, 3, 17);
  const CPCertificate cert = certify(fam, 17);
  const Matrix u = Matrix::Identity(6, 6);
  const KrausSet kraus = kraus_from_unitary(cert, u, {6, 1});
  CHECK(kraus.completeness_defect() <= 1e-9);
  for (int i = 0; i < fam.member_count(); ++i) {
    const Matrix rho_s = partial_trace(fam.members[i].matrix(), fam.dims, Side::kEnvironment);
    CHECK(trace_norm(kraus.apply(rho_s) - fam.members[i].matrix()) <= 1e-8);
  }
}

TEST_CASE("kraus action agrees with the direct reduced dynamics") {
  const JointStateFamily fam = gen_certified_random(4, 3, 3, 19);
  const CPCertificate cert = certify(fam, 19);
  SeededRng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    SeededRng local = rng.fork(trial);
    const Matrix u = random_unitary(12, local);
    for (const BipartitionDims final_dims : {BipartitionDims{4, 3}, BipartitionDims{3, 4},
                                             BipartitionDims{12, 1}}) {
      const KrausSet kraus = kraus_from_unitary(cert, u, final_dims);
      CHECK(kraus.completeness_defect() <= 1e-9);
      for (int i = 0; i < fam.member_count(); ++i) {
        const Matrix rho_s =
            partial_trace(fam.members[i].matrix(), fam.dims, Side::kEnvironment);
        const Matrix direct = reduced_dynamics_member(fam, u, final_dims, i);
        CHECK(trace_norm(kraus.apply(rho_s) - direct) <= 1e-8);
      }
    }
  }
}

TEST_CASE("pure product certificate reduces to the textbook dilation Kraus set") {
  // members rho_i ⊗ |0><0|: K_beta ∝ <beta|U|0> blocks, completeness exact
  SeededRng rng(29);
  std::vector<DensityOperator> members;
  for (int i = 0; i < 3; ++i) {
    Matrix ground = Matrix::Zero(2, 2);
    ground(0, 0) = 1.0;
    members.emplace_back(kron(random_density(2, rng).matrix(), ground));
  }
  const JointStateFamily fam = make_family({2, 2}, std::move(members));
  const CPCertificate cert = certify(fam, 31);
  const Matrix u = random_unitary(4, rng);
  const KrausSet kraus = kraus_from_unitary(cert, u, {2, 2});
  CHECK(kraus.completeness_defect() <= 1e-9);
  // compare with the dilation form on the reduced states
  for (int i = 0; i < fam.member_count(); ++i) {
    const Matrix rho_s = partial_trace(fam.members[i].matrix(), fam.dims, Side::kEnvironment);
    const Matrix direct = reduced_dynamics_member(fam, u, {2, 2}, i);
    CHECK(trace_norm(kraus.apply(rho_s) - direct) <= 1e-9);
  }
}

TEST_CASE("swap unitary on a product family sends every member to omega_e") {
  const JointStateFamily fam = gen_product_family(2, 2, 3, 37);
  const CPCertificate cert = certify(fam, 37);
  const Matrix omega_e = partial_trace(fam.members[0].matrix(), fam.dims, Side::kSystem);
  const Matrix u = swap_unitary(2, 2);
  const KrausSet kraus = kraus_from_unitary(cert, u, {2, 2});
  for (int i = 0; i < fam.member_count(); ++i) {
    const Matrix rho_s = partial_trace(fam.members[i].matrix(), fam.dims, Side::kEnvironment);
    CHECK(trace_norm(kraus.apply(rho_s) - omega_e) <= 1e-9);
    CHECK(trace_norm(reduced_dynamics_member(fam, u, {2, 2}, i) - omega_e) <= 1e-9);
  }
}

TEST_CASE("identity dynamics acts as the identity map on members") {
  const JointStateFamily fam = gen_certified_random(3, 2, 2, 41);
  const Matrix u = Matrix::Identity(6, 6);
  for (int i = 0; i < fam.member_count(); ++i) {
    const Matrix rho_s = partial_trace(fam.members[i].matrix(), fam.dims, Side::kEnvironment);
    CHECK(trace_norm(reduced_dynamics_member(fam, u, fam.dims, i) - rho_s) <= 1e-12);
  }
}

TEST_CASE("direct and assignment-composed reduced dynamics agree on members") {
  const JointStateFamily fam = gen_certified_random(4, 2, 4, 43);
  const CPCertificate cert = certify(fam, 43);
  SeededRng rng(47);
  for (int trial = 0; trial < 5; ++trial) {
    SeededRng local = rng.fork(trial);
    const Matrix u = random_unitary(8, local);
    for (int i = 0; i < fam.member_count(); ++i) {
      const Matrix rho_s = partial_trace(fam.members[i].matrix(), fam.dims, Side::kEnvironment);
      const Matrix via_lambda = reduced_dynamics_extended(cert, u, {2, 4}, rho_s);
      const Matrix direct = reduced_dynamics_member(fam, u, {2, 4}, i);
      CHECK(trace_norm(via_lambda - direct) <= 1e-9);
    }
  }
}

TEST_CASE("composed maps rho -> tr_e'(U Λ(rho) U†) are CP for random unitaries") {
  const JointStateFamily fam = gen_certified_random(3, 2, 3, 53);
  const CPCertificate cert = certify(fam, 53);
  SeededRng rng(59);
  for (int trial = 0; trial < 8; ++trial) {
    SeededRng local = rng.fork(trial);
    const Matrix u = random_unitary(6, local);
    for (const BipartitionDims final_dims : {BipartitionDims{3, 2}, BipartitionDims{6, 1}}) {
      const ChoiMatrix choi = choi_of_map(
          [&](const Matrix& x) { return reduced_dynamics_extended(cert, u, final_dims, x); }, 3,
          final_dims.dim_s);
      CHECK(choi.min_eigenvalue() >= -1e-9);
    }
  }
}

TEST_CASE("kraus set and its choi matrix agree as linear maps") {
  const JointStateFamily fam = gen_certified_random(3, 2, 2, 61);
  const CPCertificate cert = certify(fam, 61);
  SeededRng rng(67);
  const Matrix u = random_unitary(6, rng);
  const KrausSet kraus = kraus_from_unitary(cert, u, {2, 3});
  const ChoiMatrix choi = kraus.to_choi();
  CHECK(choi.min_eigenvalue() >= -1e-12);
  for (int trial = 0; trial < 6; ++trial) {
    SeededRng local = rng.fork(trial);
    const Matrix x = random_hermitian(3, local);
    CHECK((kraus.apply(x) - choi.apply(x)).norm() <= 1e-9 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("kraus_from_unitary validates its inputs") {
  const JointStateFamily fam = gen_product_family(2, 2, 2, 71);
  const CPCertificate cert = certify(fam, 71);
  CHECK_THROWS_AS(kraus_from_unitary(cert, 2.0 * Matrix::Identity(4, 4), {2, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(kraus_from_unitary(cert, Matrix::Identity(4, 4), {3, 2}),
                  std::invalid_argument);
}

TEST_CASE("mutual information closed forms") {
  SeededRng rng(73);
  const Matrix product = kron(random_density(2, rng).matrix(), random_density(3, rng).matrix());
  CHECK(mutual_information(DensityOperator(product), {2, 3}) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(mutual_information(DensityOperator(bell_state()), {2, 2}) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("structured and direct mutual information agree on certified members") {
  for (std::uint64_t seed : {5ull, 6ull, 7ull}) {
    const JointStateFamily fam = gen_certified_random(4, 3, 3, seed);
    const CPCertificate cert = certify(fam, seed);
    for (int i = 0; i < fam.member_count(); ++i) {
      const double direct = mutual_information(fam.members[i], fam.dims);
      const double structured = mutual_information_structured(cert, i);
      CHECK(std::abs(direct - structured) <= 1e-9);
    }
  }
}

TEST_CASE("mutual information ignores the quantum parts") {
  const JointStateFamily fam = gen_certified_random(4, 2, 3, 79);
  const CPCertificate cert = certify(fam, 79);
  const double base_direct = mutual_information(fam.members[0], fam.dims);
  const double base_structured = mutual_information_structured(cert, 0);

  // rebuild member 0 with fresh random quantum parts
  SeededRng rng(83);
  for (int trial = 0; trial < 5; ++trial) {
    SeededRng local = rng.fork(trial);
    CPCertificate modified = cert;
    for (int j = 0; j < modified.reduced.block_count(); ++j) {
      if (!modified.reduced.quantum_parts[0][j]) continue;
      modified.reduced.quantum_parts[0][j] =
          random_density(modified.reduced.blocks[j].dim_l, local);
    }
    const DensityOperator rebuilt(modified.reconstruct_joint(0), 1e-8);
    CHECK(std::abs(mutual_information(rebuilt, fam.dims) - base_direct) <= 1e-10);
    CHECK(std::abs(mutual_information_structured(modified, 0) - base_structured) <= 1e-10);
  }
}
