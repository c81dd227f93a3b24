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

// The differentiation code transform: an additive program over v plus one
// fresh ancilla whose Z read-out is the derivative of tr(O [[p]] rho).

#pragma once

#include <cstdint>
#include <string>

#include "qdiff/program.hpp"

namespace qdiff {

struct DiffResult {
  Program transformed;
  QVar ancilla;
  int param_index = 0;
};

/// Name "A<j>_<n>" not used by p, smallest n >= 1.
QVar fresh_ancilla(const Program& p, int j);

/// d/d theta_j of p. `num_params` is k; 0 means the largest index in p.
/// Throws SemanticError if j is outside [1, k] or p already differentiates
/// theta_j (gadget or controlled rotation on j).
DiffResult differentiate(const Program& p, int j, int num_params = 0);

/// Same transform with a caller-chosen ancilla.
Program differentiate_with(const Program& p, int j, const QVar& ancilla);

struct JudgementConfig {
  int num_pairs = 25;   // random (O, rho)
  int num_points = 5;   // random theta*
  double h = 1e-4;
  double tolerance = 1e-5;
  std::uint64_t seed = 0;
};

struct JudgementReport {
  bool holds = false;
  double max_error = 0.0;
  int checks = 0;
};

/// Numerical validator for "derivative computes d/d theta_j of original":
/// compares the ancilla observable semantics of `derivative` against a
/// central finite difference of the original over random O, rho, theta*.
/// The same derivative program serves every draw.
JudgementReport check_judgement(const Program& original, const Program& derivative, const QVar& ancilla, int j,
                                int num_params, const JudgementConfig& cfg = {});

bool judgement_holds(const Program& original, const Program& derivative, const QVar& ancilla, int j,
                     int num_params, std::uint64_t seed = 0);

}  // namespace qdiff
