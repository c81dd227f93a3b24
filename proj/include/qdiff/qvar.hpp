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

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qdiff {

/// A named quantum variable. Qubits have dim 2; a bounded integer with d
/// basis states has dim d.
struct QVar {
  std::string name;
  int dim = 2;

  friend bool operator==(const QVar&, const QVar&) = default;
};

/// Ordered list of distinct variables. The order fixes the tensor layout:
/// the first variable is the most significant factor.
using Register = std::vector<QVar>;

/// Throws SemanticError on a duplicate name or a dimension below 2.
void validate_register(const Register& reg);

/// Position of `name` in `reg`, or -1.
int index_of(const Register& reg, const std::string& name);

bool contains(const Register& reg, const std::string& name);

/// Product of the variable dimensions.
std::size_t register_dim(const Register& reg);

/// Union preserving the order of `a`, then new variables of `b` in order.
/// Throws SemanticError if a name appears with two different dimensions.
Register register_union(const Register& a, const Register& b);

std::string register_to_string(const Register& reg);

}  // namespace qdiff
