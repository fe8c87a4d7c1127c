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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tacticforge/common/matrix.hpp"

namespace tacticforge::classifier {

// Single linear layer with an independent sigmoid per class.
struct HeadModel {
  std::vector<std::string> class_names;
  Matrix weights;  // n_classes x dim; serialized as dim x n_classes
  std::vector<double> bias;
  std::string backend_id;

  std::size_t num_classes() const { return class_names.size(); }
  std::size_t dim() const { return weights.cols(); }
  static HeadModel zeros(std::vector<std::string> class_names, std::size_t dim,
                         std::string backend_id);
};

nlohmann::json to_json(const HeadModel& model);
HeadModel head_from_json(const nlohmann::json& j);

double sigmoid(double z);

// sigmoid(W v + b) per class. Throws std::invalid_argument on a dimension
// mismatch.
std::vector<double> predict(const HeadModel& model, std::span<const double> vector);
Matrix predict_all(const HeadModel& model, const Matrix& vectors);

struct SplitRatios {
  double train = 0.85;
  double test = 0.10;
  double validation = 0.05;
};

struct TrainConfig {
  double learning_rate = 2e-5;
  std::size_t batch_size = 16;
  std::size_t epochs = 3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  SplitRatios ratios;

  void validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::size_t> validation;
};

// Deterministic split of examples 0..n-1 with exact global sizes. Examples
// sharing a stratum key (of at least three members) are spread across the
// parts in proportion; smaller strata are pooled. Throws
// std::invalid_argument on empty input or ratios that do not sum to 1.
SplitIndices split(const std::vector<std::string>& strata, const SplitRatios& ratios,
                   std::uint64_t seed);

// Features plus multi-hot targets, row-aligned.
struct Dataset {
  Matrix x;
  Matrix y;
  std::size_t size() const { return x.rows(); }
  Dataset subset(std::span<const std::size_t> rows) const;
};

struct Gradients {
  double loss = 0.0;
  Matrix weights;
  std::vector<double> bias;
};

// Mean binary cross-entropy over every (example, class) entry, computed
// from logits.
double bce_loss(const HeadModel& model, const Dataset& data);
Gradients bce_gradients(const HeadModel& model, const Dataset& data);

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainResult {
  HeadModel model;                        // parameters of the best epoch
  std::vector<double> epoch_train_loss;   // full training-set loss after each epoch
  std::vector<double> epoch_val_micro_f1;
  std::size_t best_epoch = 0;             // 1-based
};

// Adam over mini-batches reshuffled each epoch. Keeps the epoch with the
// highest validation micro-F1 (earliest wins ties; the last epoch when the
// validation set is empty).
TrainResult train_head(const Dataset& train, const Dataset& validation,
                       std::vector<std::string> class_names, const TrainConfig& config,
                       std::string backend_id);

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  std::optional<double> roc_auc;  // undefined without both positives and negatives
};

struct Metrics {
  std::vector<ClassMetrics> per_class;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  std::size_t examples = 0;
};

inline constexpr double kDecisionThreshold = 0.5;

// Scores >= 0.5 count as positive. 0/0 ratios are reported as 0.
Metrics evaluate(const Matrix& scores, const Matrix& truth,
                 const std::vector<std::string>& class_names);

// Trapezoidal area under the ROC curve, one point per distinct score.
std::optional<double> roc_auc(std::span<const double> scores, std::span<const double> truth);

nlohmann::json to_json(const Metrics& metrics);
std::string metrics_table(const Metrics& metrics);

}  // namespace tacticforge::classifier
