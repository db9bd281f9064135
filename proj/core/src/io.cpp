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

#include "kistruct/io.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

namespace kistruct {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json re_row = json::array(), im_row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.contains("re") || !j.contains("im"))
    throw std::runtime_error(where + ": matrix object needs fields 're' and 'im'");
  const json& re = j.at("re");
  const json& im = j.at("im");
  if (!re.is_array() || re.empty() || !re.front().is_array())
    throw std::runtime_error(where + ": 're' must be a nested row-major array");
  const auto rows = re.size();
  const auto cols = re.front().size();
  if (im.size() != rows)
    throw std::runtime_error(where + ": 're' and 'im' row counts differ");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (re[i].size() != cols || im[i].size() != cols)
      throw std::runtime_error(where + ": ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cplx(re[i][j].get<double>(), im[i][j].get<double>());
  }
  return m;
}

json parse_stream(std::istream& in, const std::string& what) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw std::runtime_error(what + ": " + err.what());
  }
}

}  // namespace

JointStateFamily read_family(std::istream& in, double atol) {
  const json j = parse_stream(in, "family file");
  if (!j.contains("dim_s") || !j.contains("dim_e") || !j.contains("states"))
    throw std::runtime_error("family file: need fields dim_s, dim_e, states");
  if (j.contains("convention") && j.at("convention").get<std::string>() != "system-major")
    throw std::runtime_error("family file: unsupported index convention");
  const int dim_s = j.at("dim_s").get<int>();
  const int dim_e = j.at("dim_e").get<int>();
  const BipartitionDims dims{dim_s, dim_e};
  const json& states = j.at("states");
  if (!states.is_array() || states.empty())
    throw std::runtime_error("family file: 'states' must be a nonempty array");

  std::vector<DensityOperator> members;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Matrix m = matrix_from_json(states[i], "family file, state " + std::to_string(i));
    if (m.rows() != dims.joint() || m.cols() != dims.joint())
      throw std::runtime_error("family file, state " + std::to_string(i) +
                               ": shape does not match (dim_s*dim_e)^2");
    try {
      members.emplace_back(m, atol);
    } catch (const std::invalid_argument& err) {
      throw std::runtime_error("family file, state " + std::to_string(i) + ": " + err.what());
    }
  }
  return make_family(dims, std::move(members));
}

void write_family(std::ostream& out, const JointStateFamily& family) {
  json states = json::array();
  for (const auto& rho : family.members) states.push_back(matrix_to_json(rho.matrix()));
  const json j{{"convention", "system-major"},
               {"dim_s", family.dims.dim_s},
               {"dim_e", family.dims.dim_e},
               {"states", std::move(states)}};
  out << j.dump(2) << "\n";
}

Matrix read_matrix(std::istream& in) {
  const json j = parse_stream(in, "matrix file");
  return matrix_from_json(j, "matrix file");
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << matrix_to_json(m).dump(2) << "\n";
}

MapOnStates read_pairs(std::istream& in) {
  const json j = parse_stream(in, "pairs file");
  if (!j.contains("in_dim") || !j.contains("out_dim") || !j.contains("pairs"))
    throw std::runtime_error("pairs file: need fields in_dim, out_dim, pairs");
  const int in_dim = j.at("in_dim").get<int>();
  const int out_dim = j.at("out_dim").get<int>();
  std::vector<std::pair<Matrix, Matrix>> pairs;
  for (std::size_t i = 0; i < j.at("pairs").size(); ++i) {
    const json& p = j.at("pairs")[i];
    const std::string where = "pairs file, pair " + std::to_string(i);
    if (!p.contains("input") || !p.contains("output"))
      throw std::runtime_error(where + ": need fields input and output");
    pairs.emplace_back(matrix_from_json(p.at("input"), where),
                       matrix_from_json(p.at("output"), where));
  }
  try {
    return make_map_on_states(in_dim, out_dim, std::move(pairs));
  } catch (const std::invalid_argument& err) {
    throw std::runtime_error(std::string("pairs file: ") + err.what());
  }
}

void write_pairs(std::ostream& out, const MapOnStates& m) {
  json pairs = json::array();
  for (const auto& [rho, sigma] : m.pairs)
    pairs.push_back(json{{"input", matrix_to_json(rho)}, {"output", matrix_to_json(sigma)}});
  const json j{{"in_dim", m.in_dim}, {"out_dim", m.out_dim}, {"pairs", std::move(pairs)}};
  out << j.dump(2) << "\n";
}

}  // namespace kistruct
