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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tacticforge/common/matrix.hpp"
#include "tacticforge/simd/kernels.hpp"

namespace tacticforge::cluster {

// Fitted partition of a point set. For SOM fits, cluster ids are grid cells
// in row-major order and `grid_rows` x `grid_cols` gives the map shape.
struct ClusterModel {
  std::string algorithm = "kmeans";
  std::uint64_t seed = 0;
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  Matrix centroids;                        // k x dim
  std::vector<std::uint32_t> assignments;  // point index -> cluster id
  double inertia = 0.0;                    // sum of squared distances
  std::vector<double> inertia_history;     // one entry per assignment pass
  std::size_t iterations = 0;

  std::size_t k() const { return centroids.rows(); }
  std::vector<std::size_t> cluster_sizes() const;
  // Point indices of one cluster, ascending.
  std::vector<std::size_t> members(std::size_t cluster_id) const;
};

struct KMeansOptions {
  std::size_t k = 30;
  std::uint64_t seed = 0;
  std::size_t max_iters = 300;
  double tol = 1e-6;
  // Independent seedings; the fit with the lowest final inertia is kept.
  std::size_t restarts = 10;
  // Assignment-step workers; results do not depend on this.
  std::size_t threads = 1;
  const simd::KernelTable* kernels = nullptr;  // nullptr -> simd::active()
};

std::size_t count_distinct_rows(const Matrix& points);

// Lloyd's algorithm from greedy k-means++ seeding, best of `restarts`. Throws std::invalid_argument
// when points is empty or k exceeds the number of distinct points.
ClusterModel kmeans_fit(const Matrix& points, const KMeansOptions& options);

struct SomOptions {
  std::size_t rows = 6;
  std::size_t cols = 6;
  std::uint64_t seed = 0;
  std::size_t epochs = 10;
  double alpha_start = 0.5;
  double alpha_end = 0.01;
  double sigma_start = -1.0;  // negative -> max(rows, cols) / 2
  double sigma_end = 0.5;
  // (rows * cols) x dim starting weights; nullptr draws them uniformly
  // inside the bounding box of the data.
  const Matrix* initial_weights = nullptr;
  const simd::KernelTable* kernels = nullptr;
};

struct GridCell {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct SomModel {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t seed = 0;
  Matrix weights;  // (rows * cols) x dim, row-major over the grid
  std::vector<GridCell> assignments;
  double initial_quantization_error = 0.0;
  double final_quantization_error = 0.0;

  ClusterModel as_cluster_model(const Matrix& points) const;
};

// Online Kohonen map: per sample, pull the best-matching unit and its grid
// neighbours toward the sample with a Gaussian neighbourhood. Learning rate
// and width decay linearly over all steps.
SomModel som_fit(const Matrix& points, const SomOptions& options);

// Mean Euclidean distance from each point to its nearest row of `units`.
double quantization_error(const Matrix& points, const Matrix& units,
                          const simd::KernelTable* kernels = nullptr);

// Nearest centroid by Euclidean distance; ties go to the lowest id.
std::size_t assign(const ClusterModel& model, std::span<const double> point);
GridCell assign(const SomModel& model, std::span<const double> point);

// Fraction of points that belong to the majority class of their cluster.
// Throws std::invalid_argument on empty input or mismatched key sets.
template <typename Id, typename ClusterId, typename Label>
double purity(const std::map<Id, ClusterId>& assignments, const std::map<Id, Label>& labels);

double purity(std::span<const std::uint32_t> assignments, std::span<const std::string> labels);

nlohmann::json model_to_json(const ClusterModel& model);
ClusterModel model_from_json(const nlohmann::json& j);

// "payload_id,cluster_id" per line.
std::string assignments_to_csv(const std::vector<std::uint32_t>& assignments);
std::vector<std::uint32_t> assignments_from_csv(std::string_view text);

// One row per point: dim value columns, cluster id, label.
std::string export_embeddings_csv(const Matrix& points, const std::vector<std::uint32_t>& clusters,
                                  const std::vector<std::string>& labels);

// ---------------------------------------------------------------------------

template <typename Id, typename ClusterId, typename Label>
double purity(const std::map<Id, ClusterId>& assignments, const std::map<Id, Label>& labels) {
  if (assignments.empty()) throw std::invalid_argument("purity: no points");
  if (assignments.size() != labels.size()) throw std::invalid_argument("purity: key sets differ");
  std::map<ClusterId, std::map<Label, std::size_t>> counts;
  auto lit = labels.begin();
  for (const auto& [id, cluster] : assignments) {
    if (lit->first != id) throw std::invalid_argument("purity: key sets differ");
    ++counts[cluster][lit->second];
    ++lit;
  }
  std::size_t majority = 0;
  for (const auto& [cluster, per_class] : counts) {
    std::size_t best = 0;
    for (const auto& [label, n] : per_class) best = std::max(best, n);
    majority += best;
  }
  return static_cast<double>(majority) / static_cast<double>(assignments.size());
}

}  // namespace tacticforge::cluster
