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

#include "tacticforge/cluster/cluster.hpp"
#include "tacticforge/common/rng.hpp"

namespace tacticforge::cluster {

double quantization_error(const Matrix& points, const Matrix& units,
                          const simd::KernelTable* kernels) {
  if (points.empty()) return 0.0;
  const simd::KernelTable& kt = kernels ? *kernels : simd::active();
  double total = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto best =
        simd::nearest_row(kt, points.row(i).data(), units.data(), units.rows(), points.cols());
    total += std::sqrt(best.squared_distance);
  }
  return total / static_cast<double>(points.rows());
}

SomModel som_fit(const Matrix& points, const SomOptions& options) {
  if (points.empty()) throw std::invalid_argument("som: no points");
  if (options.rows == 0 || options.cols == 0) throw std::invalid_argument("som: empty grid");
  const simd::KernelTable& kt = options.kernels ? *options.kernels : simd::active();
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  const std::size_t units = options.rows * options.cols;

  Rng rng(options.seed);
  SomModel model;
  model.rows = options.rows;
  model.cols = options.cols;
  model.seed = options.seed;
  model.weights = Matrix(units, dim);

  if (options.initial_weights) {
    if (options.initial_weights->rows() != units || options.initial_weights->cols() != dim) {
      throw std::invalid_argument("som: initial weights do not match grid and dimension");
    }
    model.weights = *options.initial_weights;
  }
  // Uniform draws inside the per-dimension range of the data.
  std::vector<double> lo(points.row(0).begin(), points.row(0).end()), hi = lo;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], points(i, d));
      hi[d] = std::max(hi[d], points(i, d));
    }
  }
  for (std::size_t u = 0; u < units && !options.initial_weights; ++u) {
    for (std::size_t d = 0; d < dim; ++d) model.weights(u, d) = lo[d] + (hi[d] - lo[d]) * rng.uniform();
  }
  model.initial_quantization_error = quantization_error(points, model.weights, &kt);

  const double sigma0 = options.sigma_start > 0.0
                            ? options.sigma_start
                            : static_cast<double>(std::max(options.rows, options.cols)) / 2.0;
  const double sigma1 = options.sigma_end;
  const double steps = static_cast<double>(options.epochs * n);
  std::size_t t = 0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const double frac = steps > 1.0 ? static_cast<double>(t) / (steps - 1.0) : 0.0;
      const double alpha = options.alpha_start + (options.alpha_end - options.alpha_start) * frac;
      const double sigma = sigma0 + (sigma1 - sigma0) * frac;
      const double* x = points.row(idx).data();
      const auto bmu = simd::nearest_row(kt, x, model.weights.data(), units, dim).index;
      const double br = static_cast<double>(bmu / options.cols);
      const double bc = static_cast<double>(bmu % options.cols);
      const double denom = 2.0 * sigma * sigma;
      for (std::size_t u = 0; u < units; ++u) {
        const double dr = static_cast<double>(u / options.cols) - br;
        const double dc = static_cast<double>(u % options.cols) - bc;
        const double h = u == bmu ? 1.0 : std::exp(-(dr * dr + dc * dc) / denom);
        const double rate = alpha * h;
        if (rate == 0.0) continue;
        kt.pull_toward(model.weights.row(u).data(), x, rate, dim);
      }
      ++t;
    }
  }

  model.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) model.assignments[i] = assign(model, points.row(i));
  model.final_quantization_error = quantization_error(points, model.weights, &kt);
  return model;
}

GridCell assign(const SomModel& model, std::span<const double> point) {
  if (point.size() != model.weights.cols()) throw std::invalid_argument("assign: dimension mismatch");
  const auto best = simd::nearest_row(simd::active(), point.data(), model.weights.data(),
                                      model.weights.rows(), point.size());
  return {best.index / model.cols, best.index % model.cols};
}

ClusterModel SomModel::as_cluster_model(const Matrix& points) const {
  ClusterModel m;
  m.algorithm = "som";
  m.seed = seed;
  m.grid_rows = rows;
  m.grid_cols = cols;
  m.centroids = weights;
  m.assignments.reserve(assignments.size());
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const auto id = assignments[i].row * cols + assignments[i].col;
    m.assignments.push_back(static_cast<std::uint32_t>(id));
    m.inertia += simd::active().squared_distance(points.row(i).data(), weights.row(id).data(),
                                                 points.cols());
  }
  m.inertia_history.push_back(m.inertia);
  return m;
}

}  // namespace tacticforge::cluster
