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

#include <iosfwd>
#include <string>

#include "kistruct/cp.hpp"
#include "kistruct/extension.hpp"
#include "kistruct/types.hpp"

namespace kistruct {

// JSON file formats. Matrices are stored as dense real nested arrays "re"
// and "im" in row-major order; the joint index convention is declared in
// the family header field "convention": "system-major". Numbers
// round-trip 64-bit floats exactly.

JointStateFamily read_family(std::istream& in, double atol = kDefaultAtol);
void write_family(std::ostream& out, const JointStateFamily& family);

Matrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const Matrix& m);

MapOnStates read_pairs(std::istream& in);
void write_pairs(std::ostream& out, const MapOnStates& m);

}  // namespace kistruct
