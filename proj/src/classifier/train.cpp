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

#include <cmath>
#include <numeric>
#include <sstream>

#include "tacticforge/classifier/classifier.hpp"
#include "tacticforge/common/rng.hpp"
#include "tacticforge/simd/kernels.hpp"

namespace tacticforge::classifier {

namespace {

double logit(const simd::KernelTable& kt, const HeadModel& m, std::size_t c, const double* x) {
  return kt.dot(m.weights.row(c).data(), x, m.dim()) + m.bias[c];
}

// Numerically stable -[y log s(z) + (1 - y) log(1 - s(z))].
double bce_from_logit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

double raw_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Loss and gradients over the listed rows only.
Gradients batch_gradients(const HeadModel& m, const Dataset& data,
                          std::span<const std::size_t> rows) {
  const auto& kt = simd::active();
  const std::size_t classes = m.num_classes();
  Gradients g;
  g.weights = Matrix(classes, m.dim());
  g.bias.assign(classes, 0.0);
  if (rows.empty() || classes == 0) return g;
  const double scale = 1.0 / static_cast<double>(rows.size() * classes);
  for (std::size_t i : rows) {
    const double* x = data.x.row(i).data();
    for (std::size_t c = 0; c < classes; ++c) {
      const double z = logit(kt, m, c, x);
      const double y = data.y(i, c);
      g.loss += bce_from_logit(z, y);
      const double dz = (raw_sigmoid(z) - y) * scale;
      kt.axpy(g.weights.row(c).data(), dz, x, m.dim());
      g.bias[c] += dz;
    }
  }
  g.loss *= scale;
  return g;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

}  // namespace

void TrainConfig::validate() const {
  const double sum = ratios.train + ratios.test + ratios.validation;
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");
  if (ratios.train < 0 || ratios.test < 0 || ratios.validation < 0) {
    throw std::invalid_argument("split ratios must be non-negative");
  }
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out{Matrix(rows.size(), x.cols()), Matrix(rows.size(), y.cols())};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(x.row(rows[r]).begin(), x.row(rows[r]).end(), out.x.row(r).begin());
    std::copy(y.row(rows[r]).begin(), y.row(rows[r]).end(), out.y.row(r).begin());
  }
  return out;
}

double bce_loss(const HeadModel& model, const Dataset& data) {
  return bce_gradients(model, data).loss;
}

Gradients bce_gradients(const HeadModel& model, const Dataset& data) {
  const auto rows = all_rows(data.size());
  return batch_gradients(model, data, rows);
}

TrainResult train_head(const Dataset& train, const Dataset& validation,
                       std::vector<std::string> class_names, const TrainConfig& config,
                       std::string backend_id) {
  config.validate();
  if (train.size() == 0) throw std::invalid_argument("train_head: empty training set");
  if (train.y.cols() != class_names.size()) {
    throw std::invalid_argument("train_head: target width differs from class count");
  }
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto y = train.y.row(i);
    if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
      throw std::invalid_argument("train_head: example " + std::to_string(i) + " has no class");
    }
  }

  const std::size_t classes = class_names.size();
  const std::size_t dim = train.x.cols();
  TrainResult result;
  HeadModel model = HeadModel::zeros(std::move(class_names), dim, std::move(backend_id));
  Matrix m_w(classes, dim), v_w(classes, dim);
  std::vector<double> m_b(classes, 0.0), v_b(classes, 0.0);
  double beta1_t = 1.0, beta2_t = 1.0;

  Rng rng(config.seed);
  std::vector<std::size_t> order = all_rows(train.size());
  double best_f1 = -1.0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, end - start);
      const Gradients g = batch_gradients(model, train, batch);
      if (!std::isfinite(g.loss)) {
        std::ostringstream diag;
        diag << "non-finite loss at epoch " << epoch << ", batch starting at " << start
             << " (lr=" << config.learning_rate << ")";
        throw TrainingError(diag.str());
      }
      beta1_t *= config.beta1;
      beta2_t *= config.beta2;
      const double step = config.learning_rate * std::sqrt(1.0 - beta2_t) / (1.0 - beta1_t);
      auto update = [&](double& param, double grad, double& m, double& v) {
        m = config.beta1 * m + (1.0 - config.beta1) * grad;
        v = config.beta2 * v + (1.0 - config.beta2) * grad * grad;
        param -= step * m / (std::sqrt(v) + config.epsilon * std::sqrt(1.0 - beta2_t));
      };
      for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t d = 0; d < dim; ++d) {
          update(model.weights(c, d), g.weights(c, d), m_w(c, d), v_w(c, d));
        }
        update(model.bias[c], g.bias[c], m_b[c], v_b[c]);
      }
    }

    const double loss = bce_loss(model, train);
    if (!std::isfinite(loss)) {
      throw TrainingError("non-finite training loss after epoch " + std::to_string(epoch));
    }
    result.epoch_train_loss.push_back(loss);

    double f1 = 0.0;
    if (validation.size() > 0) {
      f1 = evaluate(predict_all(model, validation.x), validation.y, model.class_names).micro_f1;
    }
    result.epoch_val_micro_f1.push_back(f1);
    const bool better = validation.size() > 0 ? f1 > best_f1 : true;
    if (better) {
      best_f1 = f1;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  return result;
}

}  // namespace tacticforge::classifier
