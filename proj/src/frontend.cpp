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

#include "qdiff/frontend.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "qdiff/errors.hpp"

namespace qdiff {

namespace {

enum class Tok {
  Ident,
  Number,
  Semi,
  Comma,
  LBracket,
  RBracket,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Assign,  // :=
  Equals,
  Arrow,
  Sum,   // []
  Ket0,  // |0>
  Minus,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Assign: return "':='";
    case Tok::Equals: return "'='";
    case Tok::Arrow: return "'->'";
    case Tok::Sum: return "'[]'";
    case Tok::Ket0: return "'|0>'";
    case Tok::Minus: return "'-'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto peek = [&](std::size_t off) -> char { return i + off < src.size() ? src[i + off] : '\0'; };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const int l = line, k = col;
    auto push = [&](Tok t, std::size_t n) {
      out.push_back({t, src.substr(i, n), l, k});
      advance(n);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t n = 1;
      while (std::isalnum(static_cast<unsigned char>(peek(n))) || peek(n) == '_') ++n;
      if (peek(n) == '\'') ++n;
      push(Tok::Ident, n);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      std::size_t n = 0;
      while (std::isdigit(static_cast<unsigned char>(peek(n)))) ++n;
      if (peek(n) == '.') {
        ++n;
        while (std::isdigit(static_cast<unsigned char>(peek(n)))) ++n;
      }
      if (peek(n) == 'e' || peek(n) == 'E') {
        std::size_t m = n + 1;
        if (peek(m) == '+' || peek(m) == '-') ++m;
        if (std::isdigit(static_cast<unsigned char>(peek(m)))) {
          n = m;
          while (std::isdigit(static_cast<unsigned char>(peek(n)))) ++n;
        }
      }
      push(Tok::Number, n);
      continue;
    }
    switch (c) {
      case ';': push(Tok::Semi, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case ']': push(Tok::RBracket, 1); continue;
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case '{': push(Tok::LBrace, 1); continue;
      case '}': push(Tok::RBrace, 1); continue;
      case '=': push(Tok::Equals, 1); continue;
      case '[':
        if (peek(1) == ']') {
          push(Tok::Sum, 2);
        } else {
          push(Tok::LBracket, 1);
        }
        continue;
      case ':':
        if (peek(1) == '=') {
          push(Tok::Assign, 2);
          continue;
        }
        break;
      case '-':
        if (peek(1) == '>') {
          push(Tok::Arrow, 2);
        } else {
          push(Tok::Minus, 1);
        }
        continue;
      case '|':
        if (peek(1) == '0' && peek(2) == '>') {
          push(Tok::Ket0, 3);
          continue;
        }
        break;
      default: break;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", l, k);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const std::set<std::string> kKeywords = {"abort", "skip", "case", "end",  "while",   "do",
                                         "done",  "qvar", "params", "gate", "measure"};

struct ParsedGateName {
  GateKind kind;
  Axis axis;
};

std::optional<ParsedGateName> parse_param_gate_name(const std::string& name) {
  std::string s = name;
  bool prime = false;
  if (!s.empty() && s.back() == '\'') {
    prime = true;
    s.pop_back();
  }
  if (s.rfind("CR", 0) == 0 && !prime) {
    if (auto a = axis_from_suffix(s.substr(2))) return ParsedGateName{GateKind::CtrlRot, *a};
    return std::nullopt;
  }
  if (s.rfind("R", 0) == 0) {
    if (auto a = axis_from_suffix(s.substr(1))) return ParsedGateName{prime ? GateKind::Gadget : GateKind::Rot, *a};
  }
  return std::nullopt;
}

bool is_reserved_gate_name(const std::string& name) {
  return is_builtin_fixed_gate(name) || parse_param_gate_name(name).has_value();
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  SourceUnit run() {
    while (at_keyword("qvar") || at_keyword("params") || at_keyword("gate") || at_keyword("measure")) {
      declaration();
    }
    SourceUnit u;
    u.body = program();
    if (cur().kind != Tok::End) fail("expected end of input, found " + describe(cur()));
    u.vars = vars_;
    u.num_params = declared_params_ ? *declared_params_ : max_param_;
    return u;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t n) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::Ident || t.kind == Tok::Number) return std::string(tok_name(t.kind)) + " '" + t.text + "'";
    return tok_name(t.kind);
  }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(cur(), msg); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) { throw ParseError(msg, t.line, t.col); }

  Token expect(Tok kind) {
    if (cur().kind != kind) fail(std::string("expected ") + tok_name(kind) + ", found " + describe(cur()));
    return toks_[pos_++];
  }

  bool accept(Tok kind) {
    if (cur().kind != kind) return false;
    ++pos_;
    return true;
  }

  bool at_keyword(const char* kw) const { return cur().kind == Tok::Ident && cur().text == kw; }

  void expect_keyword(const char* kw) {
    if (!at_keyword(kw)) fail(std::string("expected '") + kw + "', found " + describe(cur()));
    ++pos_;
  }

  long long integer() {
    const Token t = expect(Tok::Number);
    long long v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail_at(t, "expected an integer, found '" + t.text + "'");
    return v;
  }

  double real() {
    const bool neg = accept(Tok::Minus);
    const Token t = expect(Tok::Number);
    double v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail_at(t, "malformed number '" + t.text + "'");
    return neg ? -v : v;
  }

  std::string identifier(const char* what) {
    const Token t = expect(Tok::Ident);
    if (kKeywords.count(t.text)) fail_at(t, std::string("keyword '") + t.text + "' cannot be used as " + what);
    return t.text;
  }

  // ---- declarations ----

  void declaration() {
    const Token kw = toks_[pos_++];
    if (kw.text == "qvar") {
      do {
        const Token t = cur();
        const std::string name = identifier("a variable name");
        if (name.back() == '\'') fail_at(t, "variable names cannot contain '''");
        int dim = 2;
        if (accept(Tok::LBracket)) {
          const long long d = integer();
          if (d < 2 || d > 1 << 16) fail_at(t, "variable dimension must be in [2, 65536]");
          dim = static_cast<int>(d);
          expect(Tok::RBracket);
        }
        if (contains(vars_, name)) fail_at(t, "variable '" + name + "' declared twice");
        vars_.push_back({name, dim});
        explicit_vars_ = true;
      } while (accept(Tok::Comma));
      expect(Tok::Semi);
    } else if (kw.text == "params") {
      const long long k = integer();
      if (k < 0 || k > 1 << 20) fail_at(kw, "parameter count out of range");
      if (declared_params_) fail_at(kw, "parameter count declared twice");
      declared_params_ = static_cast<int>(k);
      expect(Tok::Semi);
    } else if (kw.text == "gate") {
      const Token t = cur();
      const std::string name = identifier("a gate name");
      if (is_reserved_gate_name(name)) fail_at(t, "gate name '" + name + "' is reserved");
      if (gates_.count(name)) fail_at(t, "gate '" + name + "' declared twice");
      expect(Tok::Equals);
      ComplexMatrix u = matrix();
      try {
        gates_.emplace(name, Gate::literal_matrix(name, std::move(u)));
      } catch (const NumericError& e) {
        throw SemanticError("line " + std::to_string(t.line) + ": " + e.what());
      }
      expect(Tok::Semi);
    } else {
      const Token t = cur();
      const std::string name = identifier("a measurement name");
      if (name == "M") fail_at(t, "measurement name 'M' is reserved for the computational basis");
      if (measures_.count(name)) fail_at(t, "measurement '" + name + "' declared twice");
      expect(Tok::Equals);
      expect(Tok::LBrace);
      std::vector<ComplexMatrix> ops;
      do {
        ops.push_back(matrix());
      } while (accept(Tok::Comma));
      expect(Tok::RBrace);
      expect(Tok::Semi);
      try {
        measures_.emplace(name, make_measurement(name, std::move(ops)));
      } catch (const SemanticError& e) {
        throw SemanticError("line " + std::to_string(t.line) + ": " + e.what());
      } catch (const NumericError& e) {
        throw SemanticError("line " + std::to_string(t.line) + ": " + e.what());
      }
    }
  }

  ComplexMatrix matrix() {
    const Token start = expect(Tok::LBracket);
    std::vector<std::vector<Complex>> rows;
    do {
      expect(Tok::LBracket);
      std::vector<Complex> row;
      do {
        if (accept(Tok::LParen)) {
          const double re = real();
          expect(Tok::Comma);
          const double im = real();
          expect(Tok::RParen);
          row.emplace_back(re, im);
        } else {
          row.emplace_back(real(), 0.0);
        }
      } while (accept(Tok::Comma));
      expect(Tok::RBracket);
      rows.push_back(std::move(row));
    } while (accept(Tok::Comma));
    expect(Tok::RBracket);
    const std::size_t n = rows.size();
    ComplexMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      if (rows[r].size() != n) fail_at(start, "matrix must be square");
      for (std::size_t c = 0; c < n; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return m;
  }

  // ---- program ----

  Program program() {
    Program acc = sequence();
    while (cur().kind == Tok::Sum) {
      const Token t = toks_[pos_++];
      Program rhs = sequence();
      acc = build(t, [&] { return make_sum(acc, rhs); });
    }
    return acc;
  }

  bool at_statement_start() const {
    return cur().kind == Tok::Ident || cur().kind == Tok::LParen;
  }

  bool at_statement_keyword_end() const {
    return at_keyword("end") || at_keyword("done");
  }

  Program sequence() {
    std::vector<Program> stmts;
    stmts.push_back(statement());
    while (accept(Tok::Semi)) {
      if (!at_statement_start() || at_statement_keyword_end()) break;
      stmts.push_back(statement());
    }
    const Token t = cur();
    return build(t, [&] { return make_seq(stmts); });
  }

  template <class F>
  Program build(const Token& at, F&& f) {
    try {
      return f();
    } catch (const DimensionError& e) {
      throw DimensionError("line " + std::to_string(at.line) + ", column " + std::to_string(at.col) + ": " + e.what());
    } catch (const SemanticError& e) {
      throw SemanticError("line " + std::to_string(at.line) + ", column " + std::to_string(at.col) + ": " + e.what());
    }
  }

  QVar variable() {
    const Token t = cur();
    const std::string name = identifier("a variable");
    const int idx = index_of(vars_, name);
    if (idx >= 0) return vars_[static_cast<std::size_t>(idx)];
    if (explicit_vars_) fail_at(t, "undeclared variable '" + name + "'");
    if (name.back() == '\'') fail_at(t, "variable names cannot contain '''");
    vars_.push_back({name, 2});
    return vars_.back();
  }

  Register variables() {
    Register reg;
    do {
      const Token t = cur();
      QVar v = variable();
      if (contains(reg, v.name)) fail_at(t, "variable '" + v.name + "' repeated in register");
      reg.push_back(std::move(v));
    } while (accept(Tok::Comma));
    return reg;
  }

  Register bracketed_variables() {
    expect(Tok::LBracket);
    Register reg = variables();
    expect(Tok::RBracket);
    return reg;
  }

  Measurement measurement(const Token& at, const Register& measured) {
    if (at.text == "M") return Measurement::computational(register_dim(measured));
    auto it = measures_.find(at.text);
    if (it == measures_.end()) fail_at(at, "unknown measurement '" + at.text + "'");
    return it->second;
  }

  Program statement() {
    const Token t = cur();
    if (accept(Tok::LParen)) {
      Program p = program();
      expect(Tok::RParen);
      return p;
    }
    if (t.kind != Tok::Ident) fail("expected a statement, found " + describe(t));
    if (t.text == "abort" || t.text == "skip") {
      ++pos_;
      Register reg = bracketed_variables();
      return build(t, [&] { return t.text == "abort" ? make_abort(reg) : make_skip(reg); });
    }
    if (t.text == "case") return case_statement();
    if (t.text == "while") return while_statement();
    if (kKeywords.count(t.text)) fail("unexpected keyword '" + t.text + "'");

    // Either "lhs := ..." or a bare gate application.
    if (ahead(1).kind == Tok::Assign || ahead(1).kind == Tok::Comma) {
      Register lhs = variables();
      expect(Tok::Assign);
      if (cur().kind == Tok::Ket0) {
        ++pos_;
        if (lhs.size() != 1) fail_at(t, "initialization targets exactly one variable");
        return build(t, [&] { return make_init(lhs.front()); });
      }
      const Token gt = cur();
      auto [gate, reg] = gate_application();
      if (!(lhs == reg)) fail_at(gt, "left-hand side " + register_to_string(lhs) + " differs from gate register " +
                                         register_to_string(reg));
      return build(gt, [&] { return make_apply(gate, reg); });
    }
    auto [gate, reg] = gate_application();
    return build(t, [&] { return make_apply(gate, reg); });
  }

  std::pair<Gate, Register> gate_application() {
    const Token t = cur();
    const std::string name = expect(Tok::Ident).text;
    Gate gate;
    if (is_builtin_fixed_gate(name)) {
      gate = Gate::fixed(name);
    } else if (auto it = gates_.find(name); it != gates_.end()) {
      gate = it->second;
    } else if (auto pg = parse_param_gate_name(name)) {
      expect(Tok::LParen);
      const Token pt = expect(Tok::Ident);
      int j = 0;
      if (pt.text.size() > 2 && pt.text.rfind("th", 0) == 0) {
        auto [p, ec] = std::from_chars(pt.text.data() + 2, pt.text.data() + pt.text.size(), j);
        if (ec != std::errc() || p != pt.text.data() + pt.text.size()) j = 0;
      }
      if (j < 1) fail_at(pt, "expected a parameter reference thJ (J >= 1), found '" + pt.text + "'");
      if (declared_params_ && j > *declared_params_) {
        fail_at(pt, "parameter th" + std::to_string(j) + " exceeds the declared count " +
                        std::to_string(*declared_params_));
      }
      max_param_ = std::max(max_param_, j);
      expect(Tok::RParen);
      switch (pg->kind) {
        case GateKind::Rot: gate = Gate::rot(pg->axis, j); break;
        case GateKind::CtrlRot: gate = Gate::ctrl_rot(pg->axis, j); break;
        default: gate = Gate::gadget(pg->axis, j); break;
      }
    } else {
      fail_at(t, "unknown gate '" + name + "'");
    }
    Register reg = bracketed_variables();
    return {gate, reg};
  }

  Program case_statement() {
    const Token kw = toks_[pos_++];
    const Token mt = expect(Tok::Ident);
    Register measured = bracketed_variables();
    const Measurement meas = measurement(mt, measured);
    expect(Tok::Equals);
    std::vector<Program> branches;
    do {
      const Token lt = cur();
      const long long label = integer();
      if (label != static_cast<long long>(branches.size())) {
        fail_at(lt, "expected branch label " + std::to_string(branches.size()) + ", found " + lt.text);
      }
      expect(Tok::Arrow);
      branches.push_back(program());
    } while (accept(Tok::Comma));
    expect_keyword("end");
    if (branches.size() != meas.outcomes()) {
      fail_at(kw, "case has " + std::to_string(branches.size()) + " branches but measurement '" + meas.name + "' on " +
                      register_to_string(measured) + " has " + std::to_string(meas.outcomes()) + " outcomes");
    }
    return build(kw, [&] { return make_case(measured, meas, branches); });
  }

  Program while_statement() {
    const Token kw = toks_[pos_++];
    expect(Tok::LParen);
    const Token bt = cur();
    const long long bound = integer();
    if (bound < 1 || bound > 1 << 16) fail_at(bt, "while bound must be in [1, 65536]");
    expect(Tok::RParen);
    const Token mt = expect(Tok::Ident);
    Register measured = bracketed_variables();
    const Measurement meas = measurement(mt, measured);
    expect(Tok::Equals);
    const Token one = cur();
    if (integer() != 1) fail_at(one, "while guard must test outcome 1");
    expect_keyword("do");
    Program body = program();
    expect_keyword("done");
    return build(kw, [&] { return make_while(static_cast<int>(bound), measured, meas, body); });
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Register vars_;
  bool explicit_vars_ = false;
  std::optional<int> declared_params_;
  int max_param_ = 0;
  std::map<std::string, Gate> gates_;
  std::map<std::string, Measurement> measures_;
};

// ---- printing ----

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  // Shortest form that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) {
      s = buf;
      break;
    }
  }
  return s;
}

std::string fmt_matrix(const ComplexMatrix& m) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) s += ", ";
    s += "[";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) s += ", ";
      const Complex z = m(r, c);
      if (z.imag() == 0.0) {
        s += fmt_real(z.real());
      } else {
        s += "(" + fmt_real(z.real()) + ", " + fmt_real(z.imag()) + ")";
      }
    }
    s += "]";
  }
  return s + "]";
}

std::string vars_text(const Register& reg) {
  std::string s;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (i) s += ",";
    s += reg[i].name;
  }
  return s;
}

std::string atom_text(const Program& p) {
  if (const auto* a = p->as<AbortStmt>()) return "abort[" + vars_text(a->reg) + "]";
  if (const auto* s = p->as<SkipStmt>()) return "skip[" + vars_text(s->reg) + "]";
  if (const auto* i = p->as<InitStmt>()) return i->var.name + " := |0>";
  const auto* u = p->as<ApplyStmt>();
  std::string g = u->gate.display_name();
  if (u->gate.is_parameterized()) g += "(th" + std::to_string(u->gate.param) + ")";
  return g + "[" + vars_text(u->reg) + "]";
}

std::string guard_text(const Measurement& m, const Register& measured) {
  return m.name + "[" + vars_text(measured) + "]";
}

using Lines = std::vector<std::string>;

Lines pretty(const Program& p);

Lines wrap_parens(Lines ls) {
  ls.front() = "(" + ls.front();
  ls.back() += ")";
  for (std::size_t i = 1; i < ls.size(); ++i) ls[i] = " " + ls[i];
  return ls;
}

void append(Lines& out, const Lines& more) { out.insert(out.end(), more.begin(), more.end()); }

Lines pretty(const Program& p) {
  if (const auto* s = p->as<SeqStmt>()) {
    Lines first = pretty(s->first);
    if (s->first->is<SumStmt>()) first = wrap_parens(first);
    Lines second = pretty(s->second);
    if (s->second->is<SumStmt>()) second = wrap_parens(second);
    first.back() += ";";
    append(first, second);
    return first;
  }
  if (const auto* s = p->as<SumStmt>()) {
    Lines out = pretty(s->left);
    Lines right = pretty(s->right);
    if (s->right->is<SumStmt>()) right = wrap_parens(right);
    out.push_back("[]");
    append(out, right);
    return out;
  }
  if (const auto* c = p->as<CaseStmt>()) {
    Lines out{"case " + guard_text(c->meas, c->measured) + " ="};
    for (std::size_t m = 0; m < c->branches.size(); ++m) {
      const std::string label = "  " + std::to_string(m) + " -> ";
      Lines body = pretty(c->branches[m]);
      for (std::size_t i = 0; i < body.size(); ++i) {
        out.push_back((i == 0 ? label : std::string(label.size(), ' ')) + body[i]);
      }
      if (m + 1 < c->branches.size()) out.back() += ",";
    }
    out.push_back("end");
    return out;
  }
  if (const auto* w = p->as<WhileStmt>()) {
    Lines out{"while (" + std::to_string(w->bound) + ") " + guard_text(w->meas, w->measured) + " = 1 do"};
    for (const auto& l : pretty(w->body)) out.push_back("  " + l);
    out.push_back("done");
    return out;
  }
  return {atom_text(p)};
}

std::string compact(const Program& p) {
  if (const auto* s = p->as<SeqStmt>()) {
    std::string a = compact(s->first), b = compact(s->second);
    if (s->first->is<SumStmt>()) a = "(" + a + ")";
    if (s->second->is<SumStmt>()) b = "(" + b + ")";
    return a + "; " + b;
  }
  if (const auto* s = p->as<SumStmt>()) {
    std::string b = compact(s->right);
    if (s->right->is<SumStmt>()) b = "(" + b + ")";
    return compact(s->left) + " [] " + b;
  }
  if (const auto* c = p->as<CaseStmt>()) {
    std::string out = "case " + guard_text(c->meas, c->measured) + " = ";
    for (std::size_t m = 0; m < c->branches.size(); ++m) {
      if (m) out += ", ";
      out += std::to_string(m) + " -> " + compact(c->branches[m]);
    }
    return out + " end";
  }
  if (const auto* w = p->as<WhileStmt>()) {
    return "while (" + std::to_string(w->bound) + ") " + guard_text(w->meas, w->measured) + " = 1 do " +
           compact(w->body) + " done";
  }
  return atom_text(p);
}

void collect_decls(const Program& p, std::vector<Gate>& gates, std::vector<Measurement>& meas) {
  auto add_meas = [&](const Measurement& m) {
    if (m.is_computational()) return;
    for (const auto& x : meas) {
      if (x.name == m.name) {
        if (!(x == m)) throw SemanticError("two different measurements are named '" + m.name + "'");
        return;
      }
    }
    meas.push_back(m);
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ApplyStmt>) {
          if (x.gate.kind == GateKind::Fixed && x.gate.literal.size() != 0) {
            for (const auto& g : gates) {
              if (g.name == x.gate.name) {
                if (!(g == x.gate)) throw SemanticError("two different gates are named '" + g.name + "'");
                return;
              }
            }
            gates.push_back(x.gate);
          }
        } else if constexpr (std::is_same_v<T, SeqStmt>) {
          collect_decls(x.first, gates, meas);
          collect_decls(x.second, gates, meas);
        } else if constexpr (std::is_same_v<T, CaseStmt>) {
          add_meas(x.meas);
          for (const auto& b : x.branches) collect_decls(b, gates, meas);
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          add_meas(x.meas);
          collect_decls(x.body, gates, meas);
        } else if constexpr (std::is_same_v<T, SumStmt>) {
          collect_decls(x.left, gates, meas);
          collect_decls(x.right, gates, meas);
        }
      },
      p->v);
}

}  // namespace

SourceUnit parse(const std::string& text) { return Parser(text).run(); }

SourceUnit make_unit(Program body, Register vars, int num_params) {
  SourceUnit u;
  u.vars = register_union(vars, qvar_set(body));
  u.num_params = std::max(num_params, max_param_index(body));
  u.body = std::move(body);
  return u;
}

std::string print(const SourceUnit& u) {
  std::ostringstream os;
  if (!u.vars.empty()) {
    os << "qvar ";
    for (std::size_t i = 0; i < u.vars.size(); ++i) {
      if (i) os << ", ";
      os << u.vars[i].name;
      if (u.vars[i].dim != 2) os << "[" << u.vars[i].dim << "]";
    }
    os << ";\n";
  }
  if (u.num_params > 0) os << "params " << u.num_params << ";\n";
  std::vector<Gate> gates;
  std::vector<Measurement> meas;
  collect_decls(u.body, gates, meas);
  for (const auto& g : gates) os << "gate " << g.name << " = " << fmt_matrix(g.literal) << ";\n";
  for (const auto& m : meas) {
    os << "measure " << m.name << " = {";
    for (std::size_t i = 0; i < m.ops.size(); ++i) os << (i ? ", " : "") << fmt_matrix(m.ops[i]);
    os << "};\n";
  }
  os << "\n" << print_program(u.body);
  return os.str();
}

std::string print_program(const Program& p) {
  std::string out;
  for (const auto& l : pretty(p)) out += l + "\n";
  return out;
}

std::string print_compact(const Program& p) { return compact(p); }

}  // namespace qdiff
