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


#include "qdiff/serialize.hpp"

#include <charconv>

#include "qdiff/frontend.hpp"

namespace qdiff {

nlohmann::ordered_json to_json(const CompiledMultiset& c) {
  nlohmann::ordered_json j;
  j["source_hash"] = c.source ? fnv1a_hex(print_compact(c.source)) : std::string();
  auto members = nlohmann::ordered_json::array();
  for (const auto& m : c.members) members.push_back(print_compact(m));
  j["members"] = std::move(members);
  j["nna"] = nna(c);
  j["aborting_pruned"] = c.aborting_pruned;
  return j;
}

nlohmann::ordered_json to_json(const GradientReport& r) {
  nlohmann::ordered_json j;
  j["theta"] = r.theta.values();
  j["grad"] = r.grad;
  j["method"] = r.method;
  j["nna"] = r.nna;
  j["oc"] = r.oc;
  j["shots"] = r.shots;
  if (r.delta) j["delta"] = *r.delta;
  if (r.c) j["c"] = *r.c;
  if (r.seed) j["seed"] = *r.seed;
  return j;
}

nlohmann::ordered_json to_json(const ResourceReport& r) {
  nlohmann::ordered_json j;
  j["num_params"] = r.num_params;
  j["headline_param"] = r.headline_param;
  const auto h = static_cast<std::size_t>(r.headline_param) - 1;
  j["oc"] = h < r.oc.size() ? r.oc[h] : 0;
  j["nna"] = h < r.nna.size() ? r.nna[h] : 0;
  j["gates"] = r.gate_count;
  j["lines"] = r.line_count;
  j["layers"] = r.layer_count;
  j["qubits"] = r.qubit_count;
  j["oc_per_param"] = r.oc;
  j["nna_per_param"] = r.nna;
  return j;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string loss_csv(const std::vector<double>& losses) {
  std::string out = "epoch,loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) out += std::to_string(e) + "," + format_real(losses[e]) + "\n";
  return out;
}

}  // namespace qdiff
