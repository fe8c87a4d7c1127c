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

#include <doctest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "tacticforge/classifier/classifier.hpp"
#include "tacticforge/common/error.hpp"
#include "tacticforge/embed/embedding.hpp"

using namespace tacticforge;
using namespace tacticforge::classifier;

namespace {

Dataset random_dataset(std::size_t n, std::size_t dim, std::size_t classes, Rng& rng) {
  Dataset d{tftest::random_matrix(n, dim, rng), Matrix(n, classes)};
  for (std::size_t i = 0; i < n; ++i) {
    d.y(i, rng.index(classes)) = 1.0;
    if (rng.index(4) == 0) d.y(i, rng.index(classes)) = 1.0;
  }
  return d;
}

HeadModel random_head(std::size_t classes, std::size_t dim, Rng& rng) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
  auto m = HeadModel::zeros(names, dim, "test");
  m.weights = tftest::random_matrix(classes, dim, rng);
  for (auto& b : m.bias) b = rng.uniform() * 2.0 - 1.0;
  return m;
}

}  // namespace

TEST_CASE("sigmoid is stable at the extremes") {
  CHECK(sigmoid(0.0) == 0.5);
  // Outputs stay strictly inside (0, 1) even where exp saturates.
  CHECK(sigmoid(800.0) < 1.0);
  CHECK(sigmoid(800.0) >= 0.9999);
  CHECK(sigmoid(-800.0) > 0.0);
  CHECK(sigmoid(10.0) >= 0.9999);
  CHECK(sigmoid(2.0) + sigmoid(-2.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(61);
  const double eps = 1e-4;
  for (int trial = 0; trial < 5; ++trial) {
    const auto data = random_dataset(12, 6, 4, rng);
    auto m = random_head(4, 6, rng);
    const auto g = bce_gradients(m, data);
    CHECK(g.loss == bce_loss(m, data));
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t d = 0; d < 6; ++d) {
        const double saved = m.weights(c, d);
        m.weights(c, d) = saved + eps;
        const double up = bce_loss(m, data);
        m.weights(c, d) = saved - eps;
        const double down = bce_loss(m, data);
        m.weights(c, d) = saved;
        CHECK(std::abs((up - down) / (2 * eps) - g.weights(c, d)) <= 1e-5);
      }
      const double saved = m.bias[c];
      m.bias[c] = saved + eps;
      const double up = bce_loss(m, data);
      m.bias[c] = saved - eps;
      const double down = bce_loss(m, data);
      m.bias[c] = saved;
      CHECK(std::abs((up - down) / (2 * eps) - g.bias[c]) <= 1e-5);
    }
  }
}

TEST_CASE("loss from logits matches the probability form") {
  Rng rng(62);
  const auto data = random_dataset(10, 3, 2, rng);
  const auto m = random_head(2, 3, rng);
  double expect = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto p = predict(m, data.x.row(i));
    for (std::size_t c = 0; c < 2; ++c) {
      expect -= data.y(i, c) * std::log(p[c]) + (1 - data.y(i, c)) * std::log(1 - p[c]);
    }
  }
  CHECK(bce_loss(m, data) == doctest::Approx(expect / 20.0).epsilon(1e-12));
}

TEST_CASE("predict validates dimensions") {
  const auto m = HeadModel::zeros({"a", "b"}, 3, "x");
  CHECK(predict(m, std::vector<double>{1, 2, 3}) == std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(predict(m, std::vector<double>{1, 2}), std::invalid_argument);
  Matrix rows(2, 3);
  CHECK(predict_all(m, rows).rows() == 2);
}

TEST_CASE("split sizes are exact and disjoint") {
  std::vector<std::string> strata(100, "a");
  auto s = split(strata, {}, 1);
  CHECK(s.train.size() == 85);
  CHECK(s.test.size() == 10);
  CHECK(s.validation.size() == 5);

  Rng rng(63);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(300);
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < n; ++i) keys.push_back(std::string(1, static_cast<char>('a' + rng.index(5))));
    const auto parts = split(keys, {0.7, 0.2, 0.1}, trial);
    std::set<std::size_t> seen;
    for (const auto* v : {&parts.train, &parts.test, &parts.validation}) {
      for (auto i : *v) CHECK(seen.insert(i).second);
    }
    CHECK(seen.size() == n);
    CHECK(parts.train.size() + parts.test.size() + parts.validation.size() == n);
    // Largest remainder keeps every part within one of its exact share.
    CHECK(std::abs(static_cast<double>(parts.train.size()) - 0.7 * n) < 1.0 + 1e-9);
    CHECK(std::abs(static_cast<double>(parts.test.size()) - 0.2 * n) < 1.0 + 1e-9);
    const auto again = split(keys, {0.7, 0.2, 0.1}, trial);
    CHECK(again.train == parts.train);
  }
  CHECK_THROWS_AS(split({}, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(split({"a"}, {0.5, 0.2, 0.2}, 1), std::invalid_argument);
}

TEST_CASE("split spreads large strata proportionally") {
  std::vector<std::string> keys;
  for (int i = 0; i < 400; ++i) keys.push_back(i < 300 ? "big" : "small");
  const auto s = split(keys, {}, 5);
  std::size_t big_train = 0;
  for (auto i : s.train) big_train += keys[i] == "big" ? 1 : 0;
  CHECK(big_train >= 254);
  CHECK(big_train <= 256);
}

TEST_CASE("head model json round trip") {
  Rng rng(64);
  auto m = random_head(3, 5, rng);
  m.backend_id = "reference";
  const auto j = to_json(m);
  CHECK(j.at("weights").size() == 5);  // dim rows
  CHECK(j.at("weights")[0].size() == 3);
  const auto back = head_from_json(j);
  CHECK(back.class_names == m.class_names);
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
  CHECK(back.backend_id == "reference");
  auto broken = j;
  broken["bias"] = {0.0};
  CHECK_THROWS_AS(head_from_json(broken), Error);
}

TEST_CASE("training separates linearly separable classes") {
  Rng rng(65);
  Matrix centers(3, 4);
  for (std::size_t c = 0; c < 3; ++c) centers(c, c) = 3.0;
  const auto blobs = tftest::gaussian_blobs(centers, 60, 0.3, rng);
  Dataset all{blobs.points, Matrix(blobs.points.rows(), 3)};
  for (std::size_t i = 0; i < blobs.labels.size(); ++i) all.y(i, blobs.labels[i]) = 1.0;
  std::vector<std::string> keys;
  for (auto l : blobs.labels) keys.push_back(std::to_string(l));
  TrainConfig config;
  config.learning_rate = 0.05;
  config.epochs = 30;
  config.seed = 9;
  const auto parts = split(keys, config.ratios, config.seed);
  const auto train = all.subset(parts.train);
  const auto val = all.subset(parts.validation);
  const auto r = train_head(train, val, {"a", "b", "c"}, config, "test");
  CHECK(r.epoch_train_loss.size() == 30);
  CHECK(r.epoch_train_loss.back() < r.epoch_train_loss.front());
  CHECK(r.best_epoch >= 1);
  CHECK(r.best_epoch <= 30);
  CHECK(r.epoch_val_micro_f1[r.best_epoch - 1] ==
        *std::max_element(r.epoch_val_micro_f1.begin(), r.epoch_val_micro_f1.end()));
  const auto test = all.subset(parts.test);
  CHECK(evaluate(predict_all(r.model, test.x), test.y, r.model.class_names).micro_f1 >= 0.95);

  const auto again = train_head(train, val, {"a", "b", "c"}, config, "test");
  CHECK(again.model.weights == r.model.weights);

  const auto no_val = train_head(train, Dataset{}, {"a", "b", "c"}, config, "test");
  CHECK(no_val.best_epoch == 30);
}

TEST_CASE("training rejects bad input and reports divergence") {
  Dataset d{Matrix(2, 2, 1.0), Matrix(2, 2)};
  d.y(0, 0) = 1;
  TrainConfig c;
  c.learning_rate = 0.01;
  CHECK_THROWS_AS(train_head(d, {}, {"a", "b"}, c, "t"), std::invalid_argument);  // row 1 has no class
  d.y(1, 1) = 1;
  CHECK_THROWS_AS(train_head(d, {}, {"a"}, c, "t"), std::invalid_argument);
  CHECK_THROWS_AS(train_head(Dataset{Matrix(0, 2), Matrix(0, 2)}, {}, {"a", "b"}, c, "t"),
                  std::invalid_argument);
  c.epochs = 0;
  CHECK_THROWS_AS(train_head(d, {}, {"a", "b"}, c, "t"), std::invalid_argument);
  c.epochs = 2;
  d.x(0, 1) = std::nan("");
  CHECK_THROWS_AS(train_head(d, {}, {"a", "b"}, c, "t"), TrainingError);
  try {
    train_head(d, {}, {"a", "b"}, c, "t");
  } catch (const TrainingError& e) {
    CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
  }
}

TEST_CASE("predict is monotone in the bias") {
  Rng rng(66);
  auto m = random_head(3, 4, rng);
  const std::vector<double> v = {0.3, -0.2, 0.5, 0.1};
  double prev = predict(m, v)[1];
  for (int step = 0; step < 20; ++step) {
    m.bias[1] += 0.25;
    const double p = predict(m, v)[1];
    CHECK(p > prev);
    prev = p;
  }
  m.bias[2] = 10.0;
  std::fill(m.weights.row(2).begin(), m.weights.row(2).end(), 0.0);
  CHECK(predict(m, v)[2] >= 0.9999);
}

TEST_CASE("marker tokens under the reference embedder give steady descent") {
  embed::ReferenceBackend backend;
  Rng rng(67);
  const std::vector<std::string> markers = {"robots.txt", "wp-login.php", "/bin/busybox", "/etc/passwd"};
  std::vector<std::string> texts;
  Matrix y(200, 4);
  for (std::size_t i = 0; i < 200; ++i) {
    texts.push_back("GET /" + std::to_string(rng.index(1000)) + " " + markers[i % 4]);
    y(i, i % 4) = 1.0;
  }
  const Dataset d{embed::embed_all(backend, texts).vectors, y};
  TrainConfig c;  // defaults: 3 epochs at 2e-5
  c.seed = 3;
  const auto r = train_head(d, {}, {"a", "b", "c", "d"}, c, backend.name());
  REQUIRE(r.epoch_train_loss.size() == 3);
  CHECK(r.epoch_train_loss[0] < std::log(2.0));
  CHECK(r.epoch_train_loss[1] < r.epoch_train_loss[0]);
  CHECK(r.epoch_train_loss[2] < r.epoch_train_loss[1]);
}

TEST_CASE("a single example can be fitted") {
  Dataset d{Matrix(1, 3), Matrix(1, 2)};
  d.x(0, 0) = 1.0;
  d.x(0, 2) = -0.5;
  d.y(0, 1) = 1.0;
  TrainConfig c;
  c.learning_rate = 0.05;
  c.epochs = 200;
  const auto r = train_head(d, {}, {"a", "b"}, c, "t");
  CHECK(predict(r.model, d.x.row(0))[1] > 0.9);
  CHECK(predict(r.model, d.x.row(0))[0] < 0.1);
}

TEST_CASE("a train-only split keeps everything in train") {
  const auto s = split(std::vector<std::string>(17, "x"), {1.0, 0.0, 0.0}, 4);
  CHECK(s.train.size() == 17);
  CHECK(s.test.empty());
  CHECK(s.validation.empty());
}
