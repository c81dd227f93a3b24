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


// JSON and CSV views of the pipeline's results.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qdiff/compile.hpp"
#include "qdiff/gradient.hpp"

namespace qdiff {

/// {"source_hash", "members", "nna", "aborting_pruned"}; members in compact form.
nlohmann::ordered_json to_json(const CompiledMultiset& c);
/// {"theta", "grad", "method", "nna", "oc", "shots"} plus the sampler settings if any.
nlohmann::ordered_json to_json(const GradientReport& r);
nlohmann::ordered_json to_json(const ResourceReport& r);

/// Two-space indented JSON with a trailing newline.
std::string dump(const nlohmann::ordered_json& j);

/// "epoch,loss" header, one row per entry.
std::string loss_csv(const std::vector<double>& losses);

/// Shortest decimal that reads back to the same double.
std::string format_real(double x);

}  // namespace qdiff
