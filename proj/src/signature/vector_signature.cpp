// Copyright 2026 The TacticForge Authors.
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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tacticforge/signature/signature.hpp"
#include "tacticforge/simd/kernels.hpp"

namespace tacticforge::signature {

double percentile_nearest_rank(std::vector<double> values, double percentile) {
  if (values.empty()) throw std::invalid_argument("percentile of empty set");
  if (!(percentile >= 0.0 && percentile <= 100.0)) {
    throw std::invalid_argument("percentile must lie in [0, 100]");
  }
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(percentile / 100.0 * static_cast<double>(values.size()));
  const std::size_t idx = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  return values[std::min(idx, values.size() - 1)];
}

VectorSignature make_vector_signature(const cluster::ClusterModel& model, const Matrix& points,
                                      std::size_t cluster_id, double percentile) {
  if (cluster_id >= model.k()) throw std::invalid_argument("vector signature: no such cluster");
  const auto members = model.members(cluster_id);
  if (members.empty()) {
    throw std::invalid_argument("vector signature: cluster " + std::to_string(cluster_id) +
                                " is empty");
  }
  VectorSignature sig;
  sig.cluster_id = cluster_id;
  const auto centroid = model.centroids.row(cluster_id);
  sig.centroid.assign(centroid.begin(), centroid.end());
  std::vector<double> distances;
  distances.reserve(members.size());
  for (auto i : members) {
    distances.push_back(std::sqrt(simd::squared_distance(points.row(i), centroid)));
  }
  sig.radius = percentile_nearest_rank(std::move(distances), percentile);
  return sig;
}

nlohmann::json to_json(const VectorSignature& sig) {
  return {{"cluster", sig.cluster_id},
          {"centroid", sig.centroid},
          {"radius", sig.radius},
          {"tactic", sig.tactic}};
}

VectorSignature vector_signature_from_json(const nlohmann::json& j) {
  VectorSignature sig;
  sig.cluster_id = j.at("cluster").get<std::size_t>();
  sig.centroid = j.at("centroid").get<std::vector<double>>();
  sig.radius = j.at("radius").get<double>();
  sig.tactic = j.at("tactic").get<std::string>();
  return sig;
}

std::vector<const VectorSignature*> match_vector(std::span<const VectorSignature> signatures,
                                                 std::span<const double> point) {
  std::vector<const VectorSignature*> hits;
  for (const auto& sig : signatures) {
    if (sig.centroid.size() != point.size()) continue;
    const double d = std::sqrt(simd::squared_distance(point, sig.centroid));
    if (d <= sig.radius) hits.push_back(&sig);
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const auto* a, const auto* b) { return a->cluster_id < b->cluster_id; });
  return hits;
}

}  // namespace tacticforge::signature
