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

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace kistruct {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Default validation tolerance for constructed operators.
inline constexpr double kDefaultAtol = 1e-9;

// Relative rank cutoff: an eigenvalue counts as support when it exceeds
// this fraction of the largest eigenvalue.
inline constexpr double kSupportCutoffRel = 1e-10;

// Closure / reconstruction tolerance for the block machinery.
inline constexpr double kAlgebraTol = 1e-8;

// Block probabilities at or below this floor carry no factorization
// constraint for the member in question.
inline constexpr double kProbabilityFloor = 1e-7;

// Numerical block decomposition could not be certified.
class DecompositionError : public std::runtime_error {
 public:
  explicit DecompositionError(const std::string& what) : std::runtime_error(what) {}
};

// Koashi-Imoto decomposition failed verification after all retries.
class KiError : public std::runtime_error {
 public:
  explicit KiError(const std::string& what) : std::runtime_error(what) {}
};

// Post-selection probability vanished.
class PostSelectionError : public std::runtime_error {
 public:
  explicit PostSelectionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kistruct
