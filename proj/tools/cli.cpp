// Copyright 2026 The qdiff Authors
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


#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "qdiff/autodiff.hpp"
#include "qdiff/compile.hpp"
#include "qdiff/errors.hpp"
#include "qdiff/frontend.hpp"
#include "qdiff/gradient.hpp"
#include "qdiff/harness.hpp"
#include "qdiff/semantics.hpp"
#include "qdiff/serialize.hpp"

namespace qdiff::cli {

namespace {

/// Bad flags or unreadable files.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double to_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("'" + s + "' is not a number");
  }
  if (used != s.size()) throw UsageError("'" + s + "' is not a number");
  return v;
}

std::vector<double> split_reals(const std::string& text) {
  std::vector<double> v;
  std::string tok;
  auto flush = [&] {
    if (!tok.empty()) v.push_back(to_real(tok));
    tok.clear();
  };
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      tok += c;
    }
  }
  flush();
  return v;
}

ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw UsageError(what + ": expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  ComplexMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw UsageError(what + ": matrix must be square");
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = {e[0].get<double>(), e[1].get<double>()};
      } else {
        throw UsageError(what + ": entries are numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

ComplexMatrix matrix_file(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  return matrix_from_json(j, path);
}

QVar find_var(const Layout& layout, const std::string& name) {
  const int i = index_of(layout.vars(), name);
  if (i < 0) throw SemanticError("unknown variable '" + name + "'");
  return layout.vars()[static_cast<std::size_t>(i)];
}

// Z | Z:q | P0:q | P1:q | I | file:path. Bare Z acts on the first variable.
Observable parse_observable(const std::string& spec, const Layout& layout) {
  if (spec == "I") return Observable::identity(layout.dim());
  if (spec.rfind("file:", 0) == 0) return Observable(matrix_file(spec.substr(5)));
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const QVar q = colon == std::string::npos ? layout.vars().front() : find_var(layout, spec.substr(colon + 1));
  ComplexMatrix local;
  if (kind == "Z") {
    if (q.dim != 2) throw DimensionError("Z needs a qubit, '" + q.name + "' has dimension " + std::to_string(q.dim));
    local = Observable::pauli_z().matrix();
  } else if (kind == "P0" || kind == "P1") {
    local = Observable::projector(static_cast<std::size_t>(q.dim), kind == "P1" ? 1 : 0).matrix();
  } else {
    throw UsageError("unknown observable '" + spec + "' (use Z, Z:q, P0:q, P1:q, I or file:path)");
  }
  return Observable(embed(local, {q}, layout.vars()));
}

// basis:digits (one per variable) | mixed | file:path.
DensityOperator parse_state(const std::string& spec, const Layout& layout) {
  if (spec == "mixed") {
    return DensityOperator(identity(layout.dim()) / static_cast<double>(layout.dim()));
  }
  if (spec.rfind("file:", 0) == 0) return DensityOperator(matrix_file(spec.substr(5)));
  if (spec.rfind("basis:", 0) == 0) {
    const std::string digits = spec.substr(6);
    const Register& vars = layout.vars();
    if (digits.size() != vars.size()) {
      throw UsageError("basis state needs one digit per variable (" + std::to_string(vars.size()) + ")");
    }
    std::size_t index = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(digits[i]))) throw UsageError("basis digits must be 0-9");
      const int d = digits[i] - '0';
      if (d >= vars[i].dim) throw UsageError("digit " + std::to_string(d) + " out of range for '" + vars[i].name + "'");
      index = index * static_cast<std::size_t>(vars[i].dim) + static_cast<std::size_t>(d);
    }
    return DensityOperator::basis(layout.dim(), index);
  }
  throw UsageError("unknown state '" + spec + "' (use basis:bits, mixed or file:path)");
}

struct Common {
  std::string input;
  std::string theta;
  std::string theta_file;
  std::string obs = "Z";
  std::string rho;
  std::string format;
};

ParamVector resolve_theta(const Common& c, int k) {
  if (!c.theta.empty() && !c.theta_file.empty()) throw UsageError("--theta and --theta-file are exclusive");
  std::vector<double> v;
  if (!c.theta.empty()) v = split_reals(c.theta);
  if (!c.theta_file.empty()) v = split_reals(read_file(c.theta_file));
  if (c.theta.empty() && c.theta_file.empty()) v.assign(static_cast<std::size_t>(k), 0.0);
  if (static_cast<int>(v.size()) != k) {
    throw UsageError("expected " + std::to_string(k) + " parameter values, got " + std::to_string(v.size()));
  }
  return ParamVector(std::move(v));
}

DensityOperator resolve_state(const Common& c, const Layout& layout) {
  if (c.rho.empty()) return DensityOperator::basis(layout.dim(), 0);
  return parse_state(c.rho, layout);
}

void check_format(const std::string& f, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (f == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw UsageError("unsupported --format '" + f + "' for this command (use " + list + ")");
}

std::string matrix_text(const ComplexMatrix& m) {
  std::string s;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto z = m(r, c);
      s += (c ? " " : "") + format_real(z.real()) + (z.imag() < 0 ? "-" : "+") + format_real(std::abs(z.imag())) + "i";
    }
    s += "\n";
  }
  return s;
}

nlohmann::ordered_json matrix_json(const ComplexMatrix& m) {
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

void warn_size(std::size_t members, std::ostream& err) {
  if (members > kMemberWarning) {
    err << "warning: " << members << " compiled programs; evaluation cost grows linearly with this count\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differentiate, compile and simulate parameterized quantum while-programs"};
  app.name("qdiff");
  app.require_subcommand(1);

  Common c;
  int param = 0;
  bool compact = false;
  bool sampled = false;
  double delta = 0.05;
  double shot_c = kDefaultShotConstant;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string model;
  TrainConfig train_cfg;
  std::string family = "qnn", scale = "s", control = "basic";

  auto add_input = [&](CLI::App* s) { s->add_option("input", c.input, "Program file (.qw)")->required(); };
  auto add_eval = [&](CLI::App* s) {
    s->add_option("--theta", c.theta, "Parameter values v1,v2,...");
    s->add_option("--theta-file", c.theta_file, "File with parameter values");
    s->add_option("--obs", c.obs, "Observable: Z, Z:q, P0:q, P1:q, I or file:path");
    s->add_option("--rho", c.rho, "Input state: basis:bits, mixed or file:path");
  };

  auto* parse_cmd = app.add_subcommand("parse", "Check a program and print its normal form");
  add_input(parse_cmd);
  parse_cmd->add_flag("--compact", compact, "Print the body on one line");

  auto* diff_cmd = app.add_subcommand("diff", "Print the derivative program for one parameter");
  add_input(diff_cmd);
  diff_cmd->add_option("--param", param, "Parameter index j")->required();

  auto* compile_cmd = app.add_subcommand("compile", "Compile to a multiset of plain programs");
  add_input(compile_cmd);
  compile_cmd->add_option("--param", param, "Compile the derivative for parameter j instead");
  compile_cmd->add_option("--format", c.format, "json or text");

  auto* run_cmd = app.add_subcommand("run", "Simulate the program on an input state");
  add_input(run_cmd);
  add_eval(run_cmd);
  run_cmd->add_option("--format", c.format, "json or text");

  auto* grad_cmd = app.add_subcommand("grad", "Gradient of the observable semantics");
  add_input(grad_cmd);
  add_eval(grad_cmd);
  grad_cmd->add_option("--param", param, "Only parameter j (default: all)");
  grad_cmd->add_flag("--sampled", sampled, "Monte-Carlo estimate instead of exact evaluation");
  grad_cmd->add_option("--delta", delta, "Target additive error for --sampled");
  grad_cmd->add_option("--c", shot_c, "Shot constant: N = ceil(c m^2 / delta^2)");
  grad_cmd->add_option("--seed", seed, "Sampler seed");
  grad_cmd->add_option("--jobs", jobs, "Worker threads for --sampled")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--format", c.format, "json or text");

  auto* train_cmd = app.add_subcommand("train", "Train the 4-bit classifier and print the loss curve");
  train_cmd->add_option("--model", model, "p1 or p2")->required()->check(CLI::IsMember({"p1", "p2"}));
  train_cmd->add_option("--epochs", train_cfg.epochs, "Epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train_cfg.learning_rate, "Learning rate")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--seed", train_cfg.seed, "Initialization seed");
  train_cmd->add_option("--format", c.format, "csv or json");

  auto* bench_cmd = app.add_subcommand("bench", "Generate a benchmark program and its resource counts");
  bench_cmd->add_option("--family", family, "qnn, vqe or qaoa");
  bench_cmd->add_option("--scale", scale, "s, m or l");
  bench_cmd->add_option("--control", control, "basic, shared, if or while");
  bench_cmd->add_option("--format", c.format, "json or text");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (parse_cmd->parsed()) {
      const SourceUnit u = parse(read_file(c.input));
      out << (compact ? print_compact(u.body) + "\n" : print(u));
    } else if (diff_cmd->parsed()) {
      const SourceUnit u = parse(read_file(c.input));
      out << print_program(differentiate(u.body, param, u.num_params).transformed);
    } else if (compile_cmd->parsed()) {
      if (c.format.empty()) c.format = "json";
      check_format(c.format, {"json", "text"});
      const SourceUnit u = parse(read_file(c.input));
      const Program p = param > 0 || compile_cmd->count("--param") ? differentiate(u.body, param, u.num_params).transformed
                                                                   : u.body;
      const CompiledMultiset cm = compile(p);
      warn_size(cm.size(), err);
      if (c.format == "json") {
        out << dump(to_json(cm));
      } else {
        for (const auto& m : cm.members) out << print_compact(m) << "\n";
      }
    } else if (run_cmd->parsed()) {
      if (c.format.empty()) c.format = "text";
      check_format(c.format, {"json", "text"});
      const SourceUnit u = parse(read_file(c.input));
      const Layout layout(u.vars);
      const ParamVector theta = resolve_theta(c, u.num_params);
      const DensityOperator rho = resolve_state(c, layout);
      const bool want_value = run_cmd->count("--obs") > 0;
      const DensityOperator final_state = denote(u.body, layout, theta, rho);
      std::optional<double> value;
      if (want_value) value = observable_semantics(u.body, layout, parse_observable(c.obs, layout), rho, theta);
      if (c.format == "json") {
        nlohmann::ordered_json j;
        j["vars"] = register_to_string(u.vars);
        j["trace"] = final_state.trace();
        if (value) j["value"] = *value;
        j["state"] = matrix_json(final_state.matrix());
        out << dump(j);
      } else if (value) {
        out << format_real(*value) << "\n";
      } else {
        out << "trace " << format_real(final_state.trace()) << "\n" << matrix_text(final_state.matrix());
      }
    } else if (grad_cmd->parsed()) {
      if (c.format.empty()) c.format = "json";
      check_format(c.format, {"json", "text"});
      if (!(delta > 0.0)) throw UsageError("--delta must be positive");
      if (!(shot_c > 0.0)) throw UsageError("--c must be positive");
      const SourceUnit u = parse(read_file(c.input));
      const Layout layout(u.vars);
      const ParamVector theta = resolve_theta(c, u.num_params);
      const DensityOperator rho = resolve_state(c, layout);
      const Observable o = parse_observable(c.obs, layout);
      if (u.num_params == 0) throw SemanticError("the program has no parameters");
      if (grad_cmd->count("--param") && (param < 1 || param > u.num_params)) {
        throw SemanticError("parameter index " + std::to_string(param) + " out of range [1, " +
                            std::to_string(u.num_params) + "]");
      }
      const GradientEngine engine(u.body, layout, u.num_params);
      for (int j = 1; j <= u.num_params; ++j) warn_size(engine.plan(j).nna, err);
      SamplerConfig sc;
      sc.delta = delta;
      sc.c = shot_c;
      sc.seed = seed;
      sc.jobs = jobs;
      GradientReport r = sampled ? grad_all_sampled(engine, theta, o, rho, sc) : grad_all(engine, theta, o, rho);
      std::vector<int> params;
      for (int j = 1; j <= u.num_params; ++j) params.push_back(j);
      if (grad_cmd->count("--param")) {
        const auto i = static_cast<std::size_t>(param) - 1;
        params = {param};
        r.grad = {r.grad[i]};
        r.nna = {r.nna[i]};
        r.oc = {r.oc[i]};
        r.shots = {r.shots[i]};
      }
      if (c.format == "json") {
        nlohmann::ordered_json j = to_json(r);
        j["params"] = params;
        out << dump(j);
      } else if (grad_cmd->count("--param")) {
        out << format_real(r.grad[0]) << "\n";
      } else {
        for (std::size_t i = 0; i < params.size(); ++i) {
          out << "th" << params[i] << " " << format_real(r.grad[i]) << "\n";
        }
      }
    } else if (train_cmd->parsed()) {
      if (c.format.empty()) c.format = "csv";
      check_format(c.format, {"csv", "json"});
      const bool p1 = model == "p1";
      const TrainResult r = train(p1 ? build_P1() : build_P2(), p1 ? kP1Params : kP2Params, train_cfg);
      if (c.format == "csv") {
        out << loss_csv(r.losses);
      } else {
        nlohmann::ordered_json j;
        j["model"] = model;
        j["learning_rate"] = train_cfg.learning_rate;
        j["epochs"] = train_cfg.epochs;
        j["seed"] = train_cfg.seed;
        j["loss"] = r.losses;
        j["theta"] = r.final_theta.values();
        out << dump(j);
      }
    } else if (bench_cmd->parsed()) {
      if (c.format.empty()) c.format = "json";
      check_format(c.format, {"json", "text"});
      const BenchSpec spec{parse_family(family), parse_scale(scale), parse_control(control)};
      const BenchProgram b = generate_bench(spec);
      const ResourceReport rep = bench_report(b.program, b.num_params);
      const std::string source = print(make_unit(b.program, {}, b.num_params));
      if (c.format == "json") {
        nlohmann::ordered_json j;
        j["name"] = b.name;
        j["program"] = source;
        j["report"] = to_json(rep);
        out << dump(j);
      } else {
        out << "# " << b.name << "\n" << source << "\n" << dump(to_json(rep));
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SemanticError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSemantic;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace qdiff::cli
