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

// Text syntax for .qw files.
//
//   unit     := decl* program
//   decl     := 'qvar' IDENT ['[' INT ']'] (',' IDENT ['[' INT ']'])* ';'
//             | 'params' INT ';'
//             | 'gate' IDENT '=' matrix ';'
//             | 'measure' IDENT '=' '{' matrix (',' matrix)* '}' ';'
//   program  := seq ('[]' seq)*
//   seq      := stmt (';' stmt)* [';']
//   stmt     := 'abort' '[' vars ']' | 'skip' '[' vars ']'
//             | IDENT ':=' '|0>'
//             | [vars ':='] GATE '[' vars ']'
//             | 'case' MEAS '[' vars ']' '=' INT '->' program (',' INT '->' program)* 'end'
//             | 'while' '(' INT ')' MEAS '[' vars ']' '=' '1' 'do' program 'done'
//             | '(' program ')'
//   GATE     := H | X | Y | Z | CNOT | declared gate
//             | (R|CR)(x|y|z|xx|yy|zz) '(' thJ ')' | R(x|...|zz)' '(' thJ ')'
//   matrix   := '[' row (',' row)* ']'    row := '[' entry (',' entry)* ']'
//   entry    := REAL | '(' REAL ',' REAL ')'
//
// MEAS is "M" (computational basis of the measured register) or a declared
// measurement. Case branches are labelled 0, 1, ... in order. Comments run
// from '#' to the end of the line. Qvars default to dimension 2.

#pragma once

#include <string>

#include "qdiff/program.hpp"

namespace qdiff {

struct SourceUnit {
  Register vars;  // declaration order = tensor layout
  int num_params = 0;
  Program body;
};

/// Throws ParseError (with line/column) for syntax errors, undeclared
/// variables, out-of-range parameters and branch-count mismatches; other
/// well-formedness failures surface as SemanticError.
SourceUnit parse(const std::string& text);

/// Builds a unit around an existing program: vars = qvar_set(body) unless
/// given, num_params = max(k, largest referenced index).
SourceUnit make_unit(Program body, Register vars = {}, int num_params = 0);

/// Full source text: declarations followed by the indented body.
std::string print(const SourceUnit& u);

/// The body alone, indented over several lines.
std::string print_program(const Program& p);

/// The body on a single line.
std::string print_compact(const Program& p);

}  // namespace qdiff
