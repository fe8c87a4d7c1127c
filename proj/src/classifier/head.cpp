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
#include <limits>

#include "tacticforge/classifier/classifier.hpp"
#include "tacticforge/common/error.hpp"
#include "tacticforge/simd/kernels.hpp"

namespace tacticforge::classifier {

HeadModel HeadModel::zeros(std::vector<std::string> class_names, std::size_t dim,
                           std::string backend_id) {
  HeadModel m;
  m.weights = Matrix(class_names.size(), dim);
  m.bias.assign(class_names.size(), 0.0);
  m.class_names = std::move(class_names);
  m.backend_id = std::move(backend_id);
  return m;
}

nlohmann::json to_json(const HeadModel& model) {
  nlohmann::json weights = nlohmann::json::array();
  for (std::size_t d = 0; d < model.dim(); ++d) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < model.num_classes(); ++c) row.push_back(model.weights(c, d));
    weights.push_back(std::move(row));
  }
  return {{"classes", model.class_names},
          {"weights", std::move(weights)},
          {"bias", model.bias},
          {"backend_id", model.backend_id}};
}

HeadModel head_from_json(const nlohmann::json& j) {
  HeadModel m;
  m.class_names = j.at("classes").get<std::vector<std::string>>();
  m.bias = j.at("bias").get<std::vector<double>>();
  m.backend_id = j.at("backend_id").get<std::string>();
  const auto& rows = j.at("weights");
  const std::size_t n = m.class_names.size();
  if (m.bias.size() != n) throw Error("head model: bias length differs from class count");
  m.weights = Matrix(n, rows.size());
  for (std::size_t d = 0; d < rows.size(); ++d) {
    if (rows[d].size() != n) throw Error("head model: weight row " + std::to_string(d) + " has wrong width");
    for (std::size_t c = 0; c < n; ++c) m.weights(c, d) = rows[d][c].get<double>();
  }
  for (double b : m.bias) {
    if (!std::isfinite(b)) throw Error("head model: non-finite bias");
  }
  return m;
}

double sigmoid(double z) {
  static const double kLo = std::numeric_limits<double>::min();
  static const double kHi = std::nextafter(1.0, 0.0);
  double p;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kLo, kHi);
}

std::vector<double> predict(const HeadModel& model, std::span<const double> vector) {
  if (vector.size() != model.dim()) {
    throw std::invalid_argument("predict: vector has " + std::to_string(vector.size()) +
                                " dims, model expects " + std::to_string(model.dim()));
  }
  const auto& kt = simd::active();
  std::vector<double> out(model.num_classes());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = sigmoid(kt.dot(model.weights.row(c).data(), vector.data(), vector.size()) + model.bias[c]);
  }
  return out;
}

Matrix predict_all(const HeadModel& model, const Matrix& vectors) {
  Matrix out(vectors.rows(), model.num_classes());
  for (std::size_t i = 0; i < vectors.rows(); ++i) {
    const auto p = predict(model, vectors.row(i));
    std::copy(p.begin(), p.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace tacticforge::classifier
