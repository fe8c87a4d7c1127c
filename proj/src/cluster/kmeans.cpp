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
#include <numeric>
#include <stdexcept>
#include <thread>

#include "tacticforge/cluster/cluster.hpp"
#include "tacticforge/common/rng.hpp"

namespace tacticforge::cluster {

namespace {

struct Assignment {
  std::vector<std::uint32_t> labels;
  std::vector<double> sq_dist;
  double inertia = 0.0;
};

void assign_range(const simd::KernelTable& kt, const Matrix& points, const Matrix& centroids,
                  std::size_t begin, std::size_t end, Assignment& out) {
  for (std::size_t i = begin; i < end; ++i) {
    const auto best = simd::nearest_row(kt, points.row(i).data(), centroids.data(),
                                        centroids.rows(), points.cols());
    out.labels[i] = static_cast<std::uint32_t>(best.index);
    out.sq_dist[i] = best.squared_distance;
  }
}

Assignment assign_all(const simd::KernelTable& kt, const Matrix& points, const Matrix& centroids,
                      std::size_t threads) {
  const std::size_t n = points.rows();
  Assignment out;
  out.labels.resize(n);
  out.sq_dist.resize(n);
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n / 256 + 1));
  if (workers == 1) {
    assign_range(kt, points, centroids, 0, n, out);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end] { assign_range(kt, points, centroids, begin, end, out); });
    }
    for (auto& t : pool) t.join();
  }
  // Summed in index order regardless of how the work was split.
  for (double d : out.sq_dist) out.inertia += d;
  return out;
}

// Greedy k-means++: each step draws 2 + floor(ln k) candidates by D^2
// sampling and keeps the one that lowers the total potential most.
Matrix seed_plus_plus(const simd::KernelTable& kt, const Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  Matrix centroids;
  centroids.append_row(points.row(rng.index(n)));
  std::vector<double> closest(n);
  for (std::size_t i = 0; i < n; ++i) {
    closest[i] = kt.squared_distance(points.row(i).data(), centroids.row(0).data(), dim);
  }
  std::vector<double> candidate(n), best_closest(n);
  while (centroids.rows() < k) {
    double total = 0.0;
    for (double d : closest) total += d;
    std::size_t best_pick = n;
    double best_potential = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double target = rng.uniform() * total;
      std::size_t pick = n;
      double running = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (closest[i] <= 0.0) continue;
        running += closest[i];
        pick = i;
        if (running > target) break;
      }
      if (pick == n) throw std::logic_error("k-means++: no candidate with positive distance");
      double potential = 0.0;
      const double* c = points.row(pick).data();
      for (std::size_t i = 0; i < n; ++i) {
        candidate[i] = std::min(closest[i], kt.squared_distance(points.row(i).data(), c, dim));
        potential += candidate[i];
      }
      if (best_pick == n || potential < best_potential) {
        best_pick = pick;
        best_potential = potential;
        best_closest.swap(candidate);
      }
    }
    centroids.append_row(points.row(best_pick));
    closest.swap(best_closest);
  }
  return centroids;
}

}  // namespace

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
  std::vector<std::size_t> sizes(k(), 0);
  for (auto a : assignments) ++sizes[a];
  return sizes;
}

std::vector<std::size_t> ClusterModel::members(std::size_t cluster_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == cluster_id) out.push_back(i);
  }
  return out;
}

std::size_t count_distinct_rows(const Matrix& points) {
  std::vector<std::size_t> order(points.rows());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const auto ra = points.row(a);
    const auto rb = points.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

namespace {

ClusterModel lloyd_run(const simd::KernelTable& kt, const Matrix& points, const KMeansOptions& options,
                       Rng& rng) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  const std::size_t k = options.k;

  ClusterModel model;
  model.algorithm = "kmeans";
  model.seed = options.seed;
  model.centroids = seed_plus_plus(kt, points, k, rng);

  Assignment current = assign_all(kt, points, model.centroids, options.threads);
  model.inertia_history.push_back(current.inertia);

  std::vector<double> counts(k);
  Matrix sums(k, dim);
  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    std::fill(counts.begin(), counts.end(), 0.0);
    sums = Matrix(k, dim);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = current.labels[i];
      kt.accumulate(sums.row(c).data(), points.row(i).data(), dim);
      counts[c] += 1.0;
    }

    Matrix next(k, dim);
    std::vector<bool> taken(n, false);
    bool reseeded = false;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0.0) {
        auto row = next.row(c);
        std::copy(sums.row(c).begin(), sums.row(c).end(), row.begin());
        kt.scale(row.data(), 1.0 / counts[c], dim);
        continue;
      }
      // Empty cluster: move it onto the point worst served by its centroid.
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (far == n || current.sq_dist[i] > current.sq_dist[far]) far = i;
      }
      taken[far] = true;
      reseeded = true;
      std::copy(points.row(far).begin(), points.row(far).end(), next.row(c).begin());
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(kt.squared_distance(next.row(c).data(),
                                                            model.centroids.row(c).data(), dim)));
    }
    model.centroids = std::move(next);

    Assignment updated = assign_all(kt, points, model.centroids, options.threads);
    model.inertia_history.push_back(updated.inertia);
    const bool unchanged = !reseeded && updated.labels == current.labels;
    current = std::move(updated);
    model.iterations = iter + 1;
    if (unchanged || shift < options.tol) break;
  }

  model.assignments = std::move(current.labels);
  model.inertia = current.inertia;
  return model;
}

}  // namespace

ClusterModel kmeans_fit(const Matrix& points, const KMeansOptions& options) {
  if (points.empty()) throw std::invalid_argument("kmeans: no points");
  if (options.k == 0) throw std::invalid_argument("kmeans: k must be positive");
  if (options.restarts == 0) throw std::invalid_argument("kmeans: restarts must be positive");
  const std::size_t distinct = count_distinct_rows(points);
  if (options.k > distinct) {
    throw std::invalid_argument("kmeans: k=" + std::to_string(options.k) + " exceeds " +
                                std::to_string(distinct) + " distinct points");
  }
  const simd::KernelTable& kt = options.kernels ? *options.kernels : simd::active();
  Rng rng(options.seed);
  ClusterModel best;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    ClusterModel run = lloyd_run(kt, points, options, rng);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

std::size_t assign(const ClusterModel& model, std::span<const double> point) {
  if (point.size() != model.centroids.cols()) {
    throw std::invalid_argument("assign: dimension mismatch");
  }
  return simd::nearest_row(simd::active(), point.data(), model.centroids.data(), model.k(),
                           point.size())
      .index;
}

}  // namespace tacticforge::cluster
