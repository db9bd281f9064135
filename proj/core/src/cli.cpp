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

#include "kistruct/cli.hpp"

#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kistruct/extension.hpp"
#include "kistruct/families.hpp"
#include "kistruct/io.hpp"
#include "kistruct/linalg.hpp"
#include "kistruct/log.hpp"

#ifndef KISTRUCT_VERSION_STRING
#define KISTRUCT_VERSION_STRING "0.0.0"
#endif

namespace kistruct::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;

std::string timestamp_now() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// Path "-" means stdin/stdout.
JointStateFamily load_family(const std::string& path, double atol) {
  if (path == "-") return read_family(std::cin, atol);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open family file: " + path);
  return read_family(in, atol);
}

Matrix load_matrix(const std::string& path) {
  if (path == "-") return read_matrix(std::cin);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  return read_matrix(in);
}

MapOnStates load_pairs(const std::string& path) {
  if (path == "-") return read_pairs(std::cin);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pairs file: " + path);
  return read_pairs(in);
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << text;
}

json matrix_json(const Matrix& m) {
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

json report_header(const std::string& command, std::uint64_t seed, bool reproducible) {
  json j{{"tool", "kistruct"},
         {"version", KISTRUCT_VERSION_STRING},
         {"command", command},
         {"seed", seed}};
  if (!reproducible) j["timestamp"] = timestamp_now();
  return j;
}

json block_table(const KIDecomposition& ki) {
  json blocks = json::array();
  for (int j = 0; j < ki.block_count(); ++j) {
    json probs = json::array();
    for (int i = 0; i < ki.member_count(); ++i) probs.push_back(ki.probabilities[i][j]);
    blocks.push_back(json{{"dim_l", ki.blocks[j].dim_l},
                          {"dim_r", ki.blocks[j].dim_r},
                          {"probabilities", std::move(probs)}});
  }
  return blocks;
}

struct CommonOptions {
  std::string input;
  std::string out_path;
  std::uint64_t seed = 0;
  double atol = kDefaultAtol;
  double tol = kAlgebraTol;
  bool reproducible = false;
};

void attach_common(CLI::App* cmd, CommonOptions& opt, bool with_family_input = true) {
  if (with_family_input)
    cmd->add_option("family", opt.input, "family file (JSON), or - for stdin")->required();
  cmd->add_option("--seed", opt.seed, "seed for all randomized steps (echoed in the report)")
      ->required();
  cmd->add_option("--out", opt.out_path, "output path (default stdout)");
  cmd->add_option("--atol", opt.atol, "validation tolerance for loaded states");
  cmd->add_option("--tol", opt.tol, "certification tolerance");
  cmd->add_flag("--reproducible", opt.reproducible, "omit the timestamp field from reports");
}

int cmd_check(const CommonOptions& opt) {
  const JointStateFamily family = load_family(opt.input, opt.atol);
  json report = report_header("check", opt.seed, opt.reproducible);
  report["atol"] = opt.atol;
  report["tolerance"] = opt.tol;

  const CpDecision decision = check_cp_guarantee(family, opt.seed, opt.tol);
  int exit_code = kExitNegative;
  if (const auto* cert = std::get_if<CPCertificate>(&decision)) {
    report["verdict"] = "certified";
    report["blocks"] = block_table(cert->reduced);
    double recon = 0.0, psum = 0.0;
    for (int i = 0; i < family.member_count(); ++i) {
      recon = std::max(recon,
                       trace_norm(family.members[i].matrix() - cert->reconstruct_joint(i)));
      double total = 0.0;
      for (double p : cert->reduced.probabilities[i]) total += p;
      psum = std::max(psum, std::abs(total - 1.0));
    }
    report["residuals"] =
        json{{"joint_reconstruction_max", recon}, {"probability_sum_max", psum}};
    exit_code = kExitOk;
  } else {
    const auto& violation = std::get<ViolationReport>(decision);
    report["verdict"] =
        violation.condition == ViolationKind::kInjectivity ? "ill-posed" : "violated";
    report["violation"] = json{{"condition", to_string(violation.condition)},
                               {"members", violation.members},
                               {"block", violation.block},
                               {"magnitude", violation.magnitude},
                               {"detail", violation.detail}};
  }
  emit(opt.out_path, report.dump(2) + "\n");
  return exit_code;
}

int cmd_decompose(const CommonOptions& opt) {
  const JointStateFamily family = load_family(opt.input, opt.atol);
  const KIDecomposition ki = ki_decompose(family.members, opt.seed, opt.tol);
  const KiVerification verdict = verify_ki(ki, family.members, opt.seed + 1);

  json report = report_header("decompose", opt.seed, opt.reproducible);
  report["tolerance"] = opt.tol;
  report["support_dim"] = static_cast<int>(ki.support_isometry.cols());
  report["blocks"] = block_table(ki);
  double recon = 0.0;
  for (double r : verdict.reconstruction_residuals) recon = std::max(recon, r);
  report["residuals"] = json{{"reconstruction_max", recon},
                             {"pinching_max", verdict.max_pinching_residual}};
  emit(opt.out_path, report.dump(2) + "\n");
  return kExitOk;
}

// Shared by the commands that need a certificate before doing their work.
std::pair<std::optional<CPCertificate>, json> certified_or_report(
    const JointStateFamily& family, const CommonOptions& opt, const std::string& command) {
  json report = report_header(command, opt.seed, opt.reproducible);
  report["tolerance"] = opt.tol;
  const CpDecision decision = check_cp_guarantee(family, opt.seed, opt.tol);
  if (const auto* cert = std::get_if<CPCertificate>(&decision))
    return {*cert, std::move(report)};
  const auto& violation = std::get<ViolationReport>(decision);
  report["verdict"] =
      violation.condition == ViolationKind::kInjectivity ? "ill-posed" : "violated";
  report["violation"] = json{{"condition", to_string(violation.condition)},
                             {"members", violation.members},
                             {"block", violation.block},
                             {"magnitude", violation.magnitude},
                             {"detail", violation.detail}};
  return {std::nullopt, std::move(report)};
}

int cmd_assignment(const CommonOptions& opt) {
  const JointStateFamily family = load_family(opt.input, opt.atol);
  auto [cert, report] = certified_or_report(family, opt, "assignment");
  if (!cert) {
    emit(opt.out_path, report.dump(2) + "\n");
    return kExitNegative;
  }
  const ChoiMatrix choi = assignment_map(*cert);
  double recon = 0.0;
  for (int i = 0; i < family.member_count(); ++i) {
    const Matrix rho_s =
        partial_trace(family.members[i].matrix(), family.dims, Side::kEnvironment);
    recon = std::max(recon, trace_norm(choi.apply(rho_s) - family.members[i].matrix()));
  }
  report["verdict"] = "certified";
  report["in_dim"] = choi.in_dim;
  report["out_dim"] = choi.out_dim;
  report["min_eigenvalue"] = choi.min_eigenvalue();
  report["member_reconstruction_max"] = recon;
  report["choi"] = matrix_json(choi.m);
  emit(opt.out_path, report.dump(2) + "\n");
  return kExitOk;
}

int cmd_kraus(const CommonOptions& opt, const std::string& unitary_path,
              const std::vector<int>& dims_out) {
  const JointStateFamily family = load_family(opt.input, opt.atol);
  BipartitionDims final_dims = family.dims;
  if (!dims_out.empty()) {
    if (dims_out.size() != 2) throw std::runtime_error("--dims-out expects two integers");
    final_dims = BipartitionDims{dims_out[0], dims_out[1]};
  }
  Matrix u;
  if (unitary_path.empty())
    u = Matrix::Identity(family.dims.joint(), family.dims.joint());
  else
    u = load_matrix(unitary_path);

  auto [cert, report] = certified_or_report(family, opt, "kraus");
  if (!cert) {
    emit(opt.out_path, report.dump(2) + "\n");
    return kExitNegative;
  }
  const KrausSet kraus = kraus_from_unitary(*cert, u, final_dims);
  double domain = 0.0;
  for (int i = 0; i < family.member_count(); ++i) {
    const Matrix rho_s =
        partial_trace(family.members[i].matrix(), family.dims, Side::kEnvironment);
    domain = std::max(domain, trace_norm(kraus.apply(rho_s) -
                                         reduced_dynamics_member(family, u, final_dims, i)));
  }
  report["verdict"] = "certified";
  report["in_dim"] = kraus.in_dim;
  report["out_dim"] = kraus.out_dim;
  report["completeness_defect"] = kraus.completeness_defect();
  report["domain_agreement_max"] = domain;
  json ops = json::array();
  for (const auto& k : kraus.operators) ops.push_back(matrix_json(k));
  report["operators"] = std::move(ops);
  emit(opt.out_path, report.dump(2) + "\n");
  return kExitOk;
}

int cmd_mutualinfo(const CommonOptions& opt) {
  const JointStateFamily family = load_family(opt.input, opt.atol);
  auto [cert, report] = certified_or_report(family, opt, "mutualinfo");
  if (!cert) {
    emit(opt.out_path, report.dump(2) + "\n");
    return kExitNegative;
  }
  json members = json::array();
  for (int i = 0; i < family.member_count(); ++i) {
    const double direct = mutual_information(family.members[i], family.dims);
    const double structured = mutual_information_structured(*cert, i);
    members.push_back(json{{"member", i},
                           {"direct", direct},
                           {"structured", structured},
                           {"difference", std::abs(direct - structured)}});
  }
  report["verdict"] = "certified";
  report["members"] = std::move(members);
  emit(opt.out_path, report.dump(2) + "\n");
  return kExitOk;
}

int cmd_generate(const CommonOptions& opt, const std::string& kind, int dim_s, int dim_e,
                 int count) {
  JointStateFamily family = [&] {
    if (kind == "product") return gen_product_family(dim_s, dim_e, count, opt.seed);
    if (kind == "singleton") {
      SeededRng rng(opt.seed);
      std::vector<DensityOperator> members{random_density(dim_s * dim_e, rng)};
      return make_family(BipartitionDims{dim_s, dim_e}, std::move(members));
    }
    if (kind == "certified-random") return gen_certified_random(dim_s, dim_e, count, opt.seed);
    if (kind == "liu-tong") {
      const int fixed_dim = (dim_s + 1) / 2;
      std::vector<LiuTongBlock> blocks{{fixed_dim, true}};
      if (dim_s - fixed_dim > 0) blocks.push_back({dim_s - fixed_dim, false});
      return gen_liu_tong(blocks, dim_e, count, opt.seed);
    }
    if (kind == "markov-post") {
      std::vector<MarkovBlockSpec> blocks;
      if (dim_s >= 3)
        blocks = {{2, 1}, {1, dim_s - 2}};
      else if (dim_s == 2)
        blocks = {{2, 1}};
      else
        blocks = {{1, 1}};
      const TripartiteState chain = canonical_markov_from_structure(blocks, dim_e, opt.seed);
      std::vector<DensityOperator> members;
      SeededRng rng(opt.seed);
      for (int i = 0; i < count; ++i) {
        SeededRng local = rng.fork(200 + i);
        members.push_back(post_select(chain, random_povm_element(chain.dim_a(), local)));
      }
      return make_family(BipartitionDims{dim_s, dim_e}, std::move(members));
    }
    if (kind == "bell-vs-product")
      return gen_counterexample(CounterexampleKind::kBellVsProduct, dim_s, dim_e, opt.seed);
    if (kind == "coherent-blocks")
      return gen_counterexample(CounterexampleKind::kCoherentBlocks, dim_s, dim_e, opt.seed);
    if (kind == "varying-omega")
      return gen_counterexample(CounterexampleKind::kVaryingOmega, dim_s, dim_e, opt.seed);
    throw std::runtime_error("unknown --kind: " + kind);
  }();

  std::ostringstream buffer;
  write_family(buffer, family);
  emit(opt.out_path, buffer.str());
  return kExitOk;
}

int cmd_extend(const CommonOptions& opt, const std::string& pairs_path, int max_iter,
               double feas_tol) {
  const MapOnStates m = load_pairs(pairs_path);
  json report = report_header("extend", opt.seed, opt.reproducible);
  report["max_iter"] = max_iter;
  report["tolerance"] = feas_tol;

  // A linearity witness is a certificate of refutation, so it runs before
  // the heuristic feasibility search.
  const auto witness = linear_extension_witness(m, opt.seed);
  if (witness) {
    report["verdict"] = "refuted-by-witness";
    report["witness_min_eigenvalue"] = witness->min_eigenvalue;
    report["witness_input"] = matrix_json(witness->input);
    report["witness_forced_image"] = matrix_json(witness->forced_image);
    emit(opt.out_path, report.dump(2) + "\n");
    return kExitNegative;
  }

  const FeasibilityResult result = cp_feasibility(m, max_iter, feas_tol);
  report["iterations"] = result.iterations;
  report["gap"] = result.gap;
  switch (result.status) {
    case FeasibilityStatus::kFeasible:
      report["verdict"] = "feasible";
      report["choi"] = matrix_json(result.choi->m);
      report["choi_min_eigenvalue"] = result.choi->min_eigenvalue();
      emit(opt.out_path, report.dump(2) + "\n");
      return kExitOk;
    case FeasibilityStatus::kInfeasible:
      report["verdict"] = "infeasible";
      break;
    case FeasibilityStatus::kUndecided:
      report["verdict"] = "undecided";
      break;
  }
  emit(opt.out_path, report.dump(2) + "\n");
  return kExitNegative;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"certify completely positive reduced dynamics for families of joint states"};
  app.set_version_flag("--version", KISTRUCT_VERSION_STRING);
  app.require_subcommand(1);

  CommonOptions check_opt, decompose_opt, assignment_opt, kraus_opt, mi_opt, gen_opt, ext_opt;

  CLI::App* check = app.add_subcommand("check", "decide the CP guarantee for a family");
  attach_common(check, check_opt);

  CLI::App* decompose =
      app.add_subcommand("decompose", "KI block decomposition of a state family");
  attach_common(decompose, decompose_opt);

  CLI::App* assignment =
      app.add_subcommand("assignment", "Choi matrix of the CP assignment map");
  attach_common(assignment, assignment_opt);

  std::string unitary_path;
  std::vector<int> dims_out;
  CLI::App* kraus = app.add_subcommand("kraus", "Kraus operators of the reduced dynamics");
  attach_common(kraus, kraus_opt);
  kraus->add_option("--unitary", unitary_path, "joint unitary (matrix file; default identity)");
  kraus->add_option("--dims-out", dims_out,
                    "final system/environment split (two integers; default initial split)")
      ->expected(2);

  CLI::App* mutualinfo =
      app.add_subcommand("mutualinfo", "mutual information, direct and structured routes");
  attach_common(mutualinfo, mi_opt);

  std::string kind;
  int dim_s = 2, dim_e = 2, count = 3;
  CLI::App* generate = app.add_subcommand("generate", "write a seeded family file");
  generate->add_option("--kind", kind,
                       "product|singleton|certified-random|liu-tong|markov-post|"
                       "bell-vs-product|coherent-blocks|varying-omega")
      ->required();
  generate->add_option("dim_s", dim_s, "system dimension")->required();
  generate->add_option("dim_e", dim_e, "environment dimension")->required();
  generate->add_option("--count", count, "number of members (fixed for counterexamples)");
  attach_common(generate, gen_opt, /*with_family_input=*/false);

  std::string pairs_path;
  int max_iter = 20000;
  double feas_tol = 1e-7;
  CLI::App* extend =
      app.add_subcommand("extend", "CP-extendability of a map given on finitely many states");
  extend->add_option("--pairs", pairs_path, "pairs file (JSON), or - for stdin")->required();
  extend->add_option("--max-iter", max_iter, "iteration budget for the feasibility search");
  extend->add_option("--feas-tol", feas_tol, "feasibility tolerance");
  attach_common(extend, ext_opt, /*with_family_input=*/false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (check->parsed()) return cmd_check(check_opt);
    if (decompose->parsed()) return cmd_decompose(decompose_opt);
    if (assignment->parsed()) return cmd_assignment(assignment_opt);
    if (kraus->parsed()) return cmd_kraus(kraus_opt, unitary_path, dims_out);
    if (mutualinfo->parsed()) return cmd_mutualinfo(mi_opt);
    if (generate->parsed()) return cmd_generate(gen_opt, kind, dim_s, dim_e, count);
    if (extend->parsed()) return cmd_extend(ext_opt, pairs_path, max_iter, feas_tol);
  } catch (const std::exception& err) {
    std::cerr << "kistruct: " << err.what() << "\n";
    return kExitError;
  }
  std::cerr << "kistruct: no subcommand\n";
  return kExitError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace kistruct::cli
