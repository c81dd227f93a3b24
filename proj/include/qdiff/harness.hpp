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

// The 4-bit classifier case study and the QNN/VQE/QAOA benchmark generators.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qdiff/compile.hpp"
#include "qdiff/program.hpp"

namespace qdiff {

/// q1..q4.
Register classifier_register();

/// Rx on q1..q4, then Ry, then Rz; gate i uses params[i].
Program build_block_Q(const std::vector<int>& params);

inline constexpr int kP1Params = 24;
inline constexpr int kP2Params = 36;

/// Q(th1..th12); Q(th13..th24).
Program build_P1();
/// Q(th1..th12); case M[q1] = 0 -> Q(th13..th24), 1 -> Q(th25..th36).
Program build_P2();

using Bits4 = std::array<int, 4>;

/// not(z1 xor z4).
int label_f(const Bits4& z);
/// All 16 inputs with labels, z1 most significant.
std::vector<std::pair<Bits4, int>> dataset4();

/// Init of q1..q4 followed by X where z_i = 1.
Program encode_input(const Bits4& z);

/// Probability of reading 1 on q4 after encode_input(z); p.
double classify(const Program& p, const ParamVector& theta, const Bits4& z);

/// sum_z 0.5 (l(z) - f(z))^2.
double loss(const Program& p, const ParamVector& theta);

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 1000;
  std::uint64_t seed = 42;
  double init_low = 0.0;
  double init_high = 2 * std::numbers::pi;
};

struct TrainResult {
  ParamVector initial;
  ParamVector final_theta;
  std::vector<double> losses;  // losses[e] = loss after e epochs, e = 0..epochs
};

/// theta in [init_low, init_high)^k drawn from the seed.
ParamVector initial_parameters(int k, const TrainConfig& cfg);

/// Gradient of the loss at theta, one entry per parameter.
std::vector<double> loss_gradient(const Program& p, const ParamVector& theta);

/// Full-batch gradient descent. Throws NumericError if the loss diverges.
TrainResult train(const Program& p, int num_params, const TrainConfig& cfg,
                  const std::function<void(int, double)>& on_epoch = {});

// ---- benchmarks ------------------------------------------------------------

enum class BenchFamily { QNN, VQE, QAOA };
enum class BenchScale { S, M, L };
enum class BenchControl { Basic, Shared, If, While };

struct BenchSpec {
  BenchFamily family = BenchFamily::QNN;
  BenchScale scale = BenchScale::S;
  BenchControl control = BenchControl::Basic;
};

std::string to_string(BenchFamily f);
std::string to_string(BenchScale s);
std::string to_string(BenchControl c);
/// Case-insensitive; throws SemanticError for unknown names.
BenchFamily parse_family(const std::string& s);
BenchScale parse_scale(const std::string& s);
BenchControl parse_control(const std::string& s);

/// Qubits per block.
int bench_qubits(const BenchSpec& spec);
/// Controlled layers after the first block (if / while variants).
int bench_control_layers(const BenchSpec& spec);

struct BenchProgram {
  Program program;
  int num_params = 0;
  std::string name;  // e.g. "QNN_S_w"
};

BenchProgram generate_bench(const BenchSpec& spec);

/// Resource counts with th1 as the headline parameter.
ResourceReport bench_report(const Program& p, int num_params = 0);

std::vector<BenchSpec> all_bench_specs();

}  // namespace qdiff
