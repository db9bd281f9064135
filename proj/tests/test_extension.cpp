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

#include "kistruct/extension.hpp"
#include "kistruct/families.hpp"
#include "kistruct/linalg.hpp"
#include "support/test_helpers.hpp"

using namespace kistruct;
using namespace kistruct::testing;

namespace {

MapOnStates bell_vs_product_pairs() {
  // reduced-to-joint data of the bell-vs-product family under U = 1 with
  // the full joint space as the final system
  const JointStateFamily fam = gen_counterexample(CounterexampleKind::kBellVsProduct, 2, 2, 1);
  return map_from_family(fam, Matrix::Identity(4, 4), {4, 1});
}

}  // namespace

TEST_CASE("the closed-form witness for bell-vs-product") {
  const MapOnStates m = bell_vs_product_pairs();
  const auto witness = linear_extension_witness(m, 3);
  REQUIRE(witness.has_value());
  // forced image of |1><1| is 2*bell - |00><00| with min eigenvalue (1-sqrt(5))/2
  const double expected = (1.0 - std::sqrt(5.0)) / 2.0;
  CHECK(witness->min_eigenvalue == doctest::Approx(expected).epsilon(1e-6));
  // the witness input is PSD
  CHECK(hermitian_eig(witness->input).values.minCoeff() >= -1e-10);
}

TEST_CASE("pairs sampled from a CP map never produce a witness") {
  const JointStateFamily fam = gen_certified_random(3, 2, 3, 7);
  SeededRng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    SeededRng local = rng.fork(trial);
    const Matrix u = random_unitary(6, local);
    const MapOnStates m = map_from_family(fam, u, {3, 2});
    CHECK_FALSE(linear_extension_witness(m, trial).has_value());
  }
}

TEST_CASE("a single full-rank pair admits the trivial extension") {
  SeededRng rng(11);
  std::vector<std::pair<Matrix, Matrix>> pairs{
      {random_density(2, rng).matrix(), random_density(3, rng).matrix()}};
  const MapOnStates m = make_map_on_states(2, 3, std::move(pairs));
  CHECK_FALSE(linear_extension_witness(m, 1).has_value());
  const FeasibilityResult result = cp_feasibility(m);
  CHECK(result.status == FeasibilityStatus::kFeasible);
}

TEST_CASE("identity-on-half-mixed edge case is feasible") {
  std::vector<std::pair<Matrix, Matrix>> pairs{
      {Matrix::Identity(2, 2) / 2.0, Matrix::Identity(2, 2) / 2.0}};
  const MapOnStates m = make_map_on_states(2, 2, std::move(pairs));
  const FeasibilityResult result = cp_feasibility(m);
  REQUIRE(result.status == FeasibilityStatus::kFeasible);
  REQUIRE(result.choi.has_value());
  CHECK(result.choi->min_eigenvalue() >= -1e-7);
  CHECK(trace_norm(result.choi->apply(Matrix::Identity(2, 2) / 2.0) -
                   Matrix::Identity(2, 2) / 2.0) <= 1e-7);
}

TEST_CASE("feasible results satisfy the pairing constraints tightly") {
  const JointStateFamily fam = gen_certified_random(2, 2, 3, 13);
  const MapOnStates m = map_from_family(fam, Matrix::Identity(4, 4), {4, 1});
  const FeasibilityResult result = cp_feasibility(m);
  REQUIRE(result.status == FeasibilityStatus::kFeasible);
  for (const auto& [rho, sigma] : m.pairs)
    CHECK((result.choi->apply(rho) - sigma).norm() <= 1e-10);
}

TEST_CASE("bell-vs-product is infeasible and witness-refuted") {
  const MapOnStates m = bell_vs_product_pairs();
  CHECK(linear_extension_witness(m, 5).has_value());
  const FeasibilityResult result = cp_feasibility(m);
  CHECK(result.status != FeasibilityStatus::kFeasible);
  if (result.status == FeasibilityStatus::kInfeasible) CHECK(result.gap >= 1e-3);
}

TEST_CASE("soundness: a witness always rules out feasibility") {
  SeededRng rng(17);
  const std::vector<CounterexampleKind> kinds{CounterexampleKind::kBellVsProduct,
                                              CounterexampleKind::kCoherentBlocks,
                                              CounterexampleKind::kVaryingOmega};
  for (auto kind : kinds) {
    const JointStateFamily fam = gen_counterexample(kind, 2, 2, 19);
    const MapOnStates m = map_from_family(fam, Matrix::Identity(4, 4), {4, 1});
    if (linear_extension_witness(m, 21).has_value())
      CHECK(cp_feasibility(m).status != FeasibilityStatus::kFeasible);
  }
}

TEST_CASE("certified families are feasible for random unitaries (small sweep)") {
  SeededRng rng(23);
  int feasible = 0, total = 0;
  for (int trial = 0; trial < 50; ++trial) {
    SeededRng local = rng.fork(trial);
    const int dim_s = 2 + static_cast<int>(local.uniform_int(2));  // 2..3
    const int dim_e = 2;
    const JointStateFamily fam = gen_certified_random(dim_s, dim_e, 2, 1000 + trial);
    const Matrix u = random_unitary(dim_s * dim_e, local);
    const MapOnStates m = map_from_family(fam, u, {dim_s, dim_e});
    ++total;
    if (cp_feasibility(m).status == FeasibilityStatus::kFeasible) ++feasible;
  }
  CHECK(feasible == total);
}

TEST_CASE("counterexamples are refuted with the identity instance always included") {
  SeededRng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    SeededRng local = rng.fork(trial);
    const auto kind = static_cast<CounterexampleKind>(local.uniform_int(3));
    const JointStateFamily fam = gen_counterexample(kind, 2, 2, 2000 + trial);
    // the canonical refuting instance: U = identity, full joint output
    const MapOnStates m = map_from_family(fam, Matrix::Identity(4, 4), {4, 1});
    const bool witnessed = linear_extension_witness(m, trial).has_value();
    const bool feasible = cp_feasibility(m).status == FeasibilityStatus::kFeasible;
    CHECK((witnessed || !feasible));
    CHECK_FALSE((witnessed && feasible));
  }
}

TEST_CASE("map_on_states validation") {
  SeededRng rng(31);
  const Matrix rho = random_density(2, rng).matrix();
  // duplicate inputs
  CHECK_THROWS_AS(make_map_on_states(2, 2, {{rho, rho}, {rho, rho}}), std::invalid_argument);
  // inconsistent linear data: rho -> two different outputs through a
  // dependency (rho, sigma, and their midpoint mapped inconsistently)
  const Matrix sigma = random_density(2, rng).matrix();
  const Matrix tau = random_density(2, rng).matrix();
  const Matrix mid = (rho + sigma) / 2.0;
  CHECK_THROWS_AS(
      make_map_on_states(2, 2, {{rho, rho}, {sigma, sigma}, {mid, tau}}),
      std::invalid_argument);
}

TEST_CASE("dimension validation") {
  SeededRng rng(37);
  const Matrix rho2 = random_density(2, rng).matrix();
  const Matrix rho3 = random_density(3, rng).matrix();
  CHECK_THROWS_AS(make_map_on_states(2, 2, {{rho3, rho2}}), std::invalid_argument);
  CHECK_THROWS_AS(make_map_on_states(2, 2, {{rho2, rho3}}), std::invalid_argument);
}
