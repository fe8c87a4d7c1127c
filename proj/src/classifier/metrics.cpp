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
#include <cstdio>
#include <numeric>

#include "tacticforge/classifier/classifier.hpp"

namespace tacticforge::classifier {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

std::optional<double> roc_auc(std::span<const double> scores, std::span<const double> truth) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double positives = 0.0, negatives = 0.0;
  for (std::size_t i = 0; i < n; ++i) (truth[i] > 0.5 ? positives : negatives) += 1.0;
  if (positives == 0.0 || negatives == 0.0) return std::nullopt;

  double area = 0.0, tp = 0.0, fp = 0.0, prev_tpr = 0.0, prev_fpr = 0.0;
  std::size_t i = 0;
  while (i < n) {
    // Every example sharing this score crosses the threshold together.
    const double s = scores[order[i]];
    while (i < n && scores[order[i]] == s) {
      (truth[order[i]] > 0.5 ? tp : fp) += 1.0;
      ++i;
    }
    const double tpr = tp / positives, fpr = fp / negatives;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  return area;
}

Metrics evaluate(const Matrix& scores, const Matrix& truth,
                 const std::vector<std::string>& class_names) {
  if (scores.rows() != truth.rows() || scores.cols() != truth.cols() ||
      scores.cols() != class_names.size()) {
    throw std::invalid_argument("evaluate: score/truth/class shapes differ");
  }
  Metrics m;
  m.examples = scores.rows();
  double all_tp = 0, all_fp = 0, all_fn = 0;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    double tp = 0, fp = 0, fn = 0;
    std::vector<double> col_scores(scores.rows()), col_truth(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
      const bool pred = scores(i, c) >= kDecisionThreshold;
      const bool real = truth(i, c) > 0.5;
      tp += pred && real;
      fp += pred && !real;
      fn += !pred && real;
      col_scores[i] = scores(i, c);
      col_truth[i] = truth(i, c);
    }
    ClassMetrics cm;
    cm.name = class_names[c];
    cm.precision = ratio(tp, tp + fp);
    cm.recall = ratio(tp, tp + fn);
    cm.f1 = harmonic(cm.precision, cm.recall);
    cm.support = static_cast<std::size_t>(tp + fn);
    cm.roc_auc = roc_auc(col_scores, col_truth);
    m.per_class.push_back(std::move(cm));
    all_tp += tp;
    all_fp += fp;
    all_fn += fn;
  }
  m.micro_precision = ratio(all_tp, all_tp + all_fp);
  m.micro_recall = ratio(all_tp, all_tp + all_fn);
  m.micro_f1 = harmonic(m.micro_precision, m.micro_recall);
  return m;
}

nlohmann::json to_json(const Metrics& metrics) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : metrics.per_class) {
    classes.push_back({{"class", c.name},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1},
                       {"support", c.support},
                       {"roc_auc", c.roc_auc ? nlohmann::json(*c.roc_auc) : nlohmann::json(nullptr)}});
  }
  return {{"classes", std::move(classes)},
          {"micro", {{"precision", metrics.micro_precision},
                     {"recall", metrics.micro_recall},
                     {"f1", metrics.micro_f1}}},
          {"examples", metrics.examples}};
}

std::string metrics_table(const Metrics& metrics) {
  std::size_t width = std::string("Micro Avg").size();
  for (const auto& c : metrics.per_class) width = std::max(width, c.name.size());
  std::string out;
  char buf[256];
  auto row = [&](const std::string& name, double p, double r, double f, std::size_t s) {
    std::snprintf(buf, sizeof(buf), "%-*s %9.2f %9.2f %9.2f %8zu\n", static_cast<int>(width),
                  name.c_str(), p * 100.0, r * 100.0, f * 100.0, s);
    out += buf;
  };
  std::snprintf(buf, sizeof(buf), "%-*s %9s %9s %9s %8s\n", static_cast<int>(width), "Class",
                "Prec(%)", "Rec(%)", "F1(%)", "Supp");
  out += buf;
  const std::string rule(width + 39, '-');
  out += rule + "\n";
  std::size_t support = 0;
  for (const auto& c : metrics.per_class) {
    row(c.name, c.precision, c.recall, c.f1, c.support);
    support += c.support;
  }
  out += rule + "\n";
  row("Micro Avg", metrics.micro_precision, metrics.micro_recall, metrics.micro_f1, support);
  return out;
}

}  // namespace tacticforge::classifier
