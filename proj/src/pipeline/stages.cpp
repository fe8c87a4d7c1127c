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

#include "stages.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "tacticforge/cluster/cluster.hpp"
#include "tacticforge/common/io.hpp"
#include "tacticforge/embed/embedding.hpp"
#include "tacticforge/ingest/capture.hpp"
#include "tacticforge/ingest/payload.hpp"
#include "tacticforge/signature/signature.hpp"

namespace tacticforge::pipeline::detail {

namespace {

using nlohmann::json;

std::int64_t as_count(std::size_t n) { return static_cast<std::int64_t>(n); }

// Payloads and their embeddings, row-aligned.
struct Corpus {
  std::vector<ingest::NormalizedPayload> payloads;
  embed::EmbeddingTable table;
  std::unordered_map<std::string, std::size_t> row_of;

  std::size_t row(const std::string& text) const {
    auto it = row_of.find(text);
    if (it == row_of.end()) throw Error("payload missing from payloads.jsonl: " + text.substr(0, 60));
    return it->second;
  }
};

Corpus load_corpus(StageContext& ctx) {
  Corpus c;
  c.payloads = ingest::payloads_from_jsonl(ctx.read("payloads.jsonl"));
  c.table = embed::EmbeddingTable::deserialize(ctx.read("embeddings.bin"));
  if (c.table.vectors.rows() != c.payloads.size()) {
    throw Error("embeddings.bin has " + std::to_string(c.table.vectors.rows()) + " rows for " +
                std::to_string(c.payloads.size()) + " payloads");
  }
  for (std::size_t i = 0; i < c.payloads.size(); ++i) c.row_of.emplace(c.payloads[i].text, i);
  return c;
}

classifier::Dataset to_dataset(const std::vector<label::LabeledExample>& examples, const Corpus& corpus,
                               const std::vector<std::string>& classes) {
  classifier::Dataset d{Matrix(examples.size(), corpus.table.vectors.cols()),
                        Matrix(examples.size(), classes.size())};
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto src = corpus.table.vectors.row(corpus.row(examples[i].payload.text));
    std::copy(src.begin(), src.end(), d.x.row(i).begin());
    for (const auto& name : examples[i].decided.names()) {
      const auto it = std::find(classes.begin(), classes.end(), name);
      if (it != classes.end()) d.y(i, static_cast<std::size_t>(it - classes.begin())) = 1.0;
    }
  }
  return d;
}

struct HeadRun {
  classifier::HeadModel model;
  json report;
  std::optional<classifier::Metrics> test_metrics;
};

// Splits the examples, trains on the train part, selects on validation and
// reports metrics on the test part. With no training rows the head stays at
// zero and the report says so.
HeadRun fit_head(const std::vector<label::LabeledExample>& examples, const Corpus& corpus,
                 const PipelineConfig& config, StageContext& ctx) {
  const auto classes = head_classes();
  HeadRun run;
  run.model = classifier::HeadModel::zeros(classes, embed::kDim, corpus.table.backend_id);
  run.report = json::object();
  classifier::TrainConfig tc = config.train;
  tc.seed = config.seed;

  std::vector<std::string> strata;
  for (const auto& ex : examples) strata.push_back(ex.decided.key());
  classifier::SplitIndices parts;
  if (!examples.empty()) parts = classifier::split(strata, tc.ratios, tc.seed);
  ctx.count("train_examples", as_count(parts.train.size()));
  ctx.count("test_examples", as_count(parts.test.size()));
  ctx.count("validation_examples", as_count(parts.validation.size()));
  run.report["split"] = {{"train", parts.train.size()},
                         {"test", parts.test.size()},
                         {"validation", parts.validation.size()}};
  if (parts.train.empty()) {
    run.report["trained"] = false;
    return run;
  }

  const auto all = to_dataset(examples, corpus, classes);
  const auto train = all.subset(parts.train);
  const auto val = all.subset(parts.validation);
  const auto test = all.subset(parts.test);
  auto result = classifier::train_head(train, val, classes, tc, corpus.table.backend_id);
  run.model = std::move(result.model);
  run.report["trained"] = true;
  run.report["epoch_train_loss"] = result.epoch_train_loss;
  run.report["epoch_val_micro_f1"] = result.epoch_val_micro_f1;
  run.report["best_epoch"] = result.best_epoch;
  if (test.size() > 0) {
    run.test_metrics = classifier::evaluate(classifier::predict_all(run.model, test.x), test.y, classes);
    run.report["test"] = classifier::to_json(*run.test_metrics);
  } else {
    run.report["test"] = nullptr;
  }
  return run;
}

void run_ingest(StageContext& ctx) {
  const auto& config = ctx.config();
  ingest::CaptureOptions options;
  options.honeypot = ingest::PrefixSet::parse(config.honeypot_prefixes);
  options.ports = config.ports;

  ingest::Deduplicator dedup;
  std::uint64_t seen = 0, malformed = 0, filtered = 0, inbound = 0;
  for (const auto& capture : config.captures) {
    ingest::CaptureReader reader(ctx.external_path(config.resolve(capture)), options);
    while (auto record = reader.next()) {
      if (record->direction != ingest::Direction::kInbound) continue;
      ++inbound;
      if (auto raw = ingest::extract_http(*record)) {
        dedup.add(ingest::normalize(*raw), record->timestamp_us);
      }
    }
    seen += reader.stats().records_seen;
    malformed += reader.stats().skipped_malformed;
    filtered += reader.stats().filtered;
  }
  const auto payloads = dedup.finish();
  ctx.write("payloads.jsonl", ingest::payloads_to_jsonl(payloads));
  ctx.count("packets_in", static_cast<std::int64_t>(seen));
  ctx.count("skipped_malformed", static_cast<std::int64_t>(malformed));
  ctx.count("filtered", static_cast<std::int64_t>(filtered));
  ctx.count("inbound", static_cast<std::int64_t>(inbound));
  ctx.count("packets_out", as_count(dedup.total()));
  ctx.count("unique_payloads", as_count(payloads.size()));
}

void run_embed(StageContext& ctx) {
  const auto payloads = ingest::payloads_from_jsonl(ctx.read("payloads.jsonl"));
  auto backend = embed::make_backend(ctx.config().backend);
  std::vector<std::string> texts;
  texts.reserve(payloads.size());
  for (const auto& p : payloads) texts.push_back(p.text);
  const auto table = embed::embed_all(*backend, texts);
  ctx.write("embeddings.bin", table.serialize());
  ctx.count("vectors", as_count(table.vectors.rows()));
}

void run_cluster(StageContext& ctx) {
  const auto& config = ctx.config();
  const auto table = embed::EmbeddingTable::deserialize(ctx.read("embeddings.bin"));
  const Matrix& points = table.vectors;
  cluster::ClusterModel model;
  model.algorithm = config.cluster.algorithm;
  model.seed = config.seed;
  if (!points.empty()) {
    if (config.cluster.algorithm == "som") {
      cluster::SomOptions opts;
      opts.rows = config.cluster.grid_rows;
      opts.cols = config.cluster.grid_cols;
      opts.seed = config.seed;
      opts.epochs = config.cluster.som_epochs;
      model = cluster::som_fit(points, opts).as_cluster_model(points);
    } else {
      cluster::KMeansOptions opts;
      // Small captures may hold fewer distinct payloads than k.
      opts.k = std::min(config.cluster.k, cluster::count_distinct_rows(points));
      opts.seed = config.seed;
      opts.max_iters = config.cluster.max_iters;
      opts.restarts = config.cluster.restarts;
      opts.threads = config.cluster.threads;
      model = cluster::kmeans_fit(points, opts);
    }
  }
  ctx.write("cluster_model.json", cluster::model_to_json(model).dump(1) + "\n");
  ctx.write("assignments.csv", cluster::assignments_to_csv(model.assignments));
  ctx.count("points", as_count(points.rows()));
  ctx.count("clusters", as_count(model.k()));
  ctx.count("iterations", as_count(model.iterations));
}

std::optional<label::PacketLabel> cluster_tactic(const SignatureSettings& s, std::size_t cluster_id,
                                                 const std::vector<std::string>& tokens) {
  if (auto it = s.tactic_map.find(cluster_id); it != s.tactic_map.end()) return it->second;
  std::optional<label::PacketLabel> best;
  std::size_t best_hits = 0;
  for (const auto& [l, words] : s.tactic_keywords) {
    std::size_t hits = 0;
    for (const auto& t : tokens) hits += static_cast<std::size_t>(std::count(words.begin(), words.end(), t));
    if (hits > best_hits) {
      best = l;
      best_hits = hits;
    }
  }
  return best ? best : s.default_tactic;
}

void run_signature(StageContext& ctx) {
  const auto& config = ctx.config();
  const auto& s = config.signature;
  const Corpus corpus = load_corpus(ctx);
  auto model = cluster::model_from_json(json::parse(ctx.read("cluster_model.json")));
  model.assignments = cluster::assignments_from_csv(ctx.read("assignments.csv"));
  if (model.assignments.size() != corpus.payloads.size()) {
    throw Error("assignments.csv does not match payloads.jsonl");
  }

  std::map<std::size_t, std::vector<std::string>> texts;
  std::map<std::size_t, std::size_t> mass;
  for (std::size_t i = 0; i < corpus.payloads.size(); ++i) {
    texts[model.assignments[i]].push_back(corpus.payloads[i].text);
    mass[model.assignments[i]] += corpus.payloads[i].multiplicity();
  }
  std::map<std::size_t, signature::ByteSignature> ranked;
  if (texts.size() >= 2) ranked = signature::tfidf_rank(texts, s.top_n);

  // Heaviest clusters first.
  std::vector<std::size_t> order;
  for (const auto& [id, sig] : ranked) order.push_back(id);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mass[a] > mass[b]; });
  if (order.size() > s.max_rules) order.resize(s.max_rules);

  std::vector<signature::ByteSignature> selected;
  std::map<std::size_t, std::string> tactic_of;
  json sig_json = json::array();
  for (std::size_t id : order) {
    const auto& sig = ranked.at(id);
    const auto tactic = cluster_tactic(s, id, sig.tokens);
    if (!tactic) {
      throw Error("no tactic mapping for cluster " + std::to_string(id) +
                  "; add it to signature.tactic_map, tactic_keywords or default_tactic");
    }
    tactic_of[id] = std::string(label::label_name(*tactic));
    selected.push_back(sig);
    sig_json.push_back({{"cluster", id},
                        {"tokens", sig.tokens},
                        {"weights", sig.weights},
                        {"tactic", tactic_of[id]},
                        {"mass", mass[id]}});
  }

  signature::RuleOptions rule_options;
  rule_options.base_sid = s.base_sid;
  rule_options.port = s.port;
  rule_options.contents_per_rule = s.contents_per_rule;
  const auto rules = signature::make_rules(selected, tactic_of, rule_options);
  const std::string rules_text = signature::rules_to_text(rules);

  json vec_json = json::array();
  for (const auto& [id, members] : texts) {
    auto vs = signature::make_vector_signature(model, corpus.table.vectors, id, s.radius_percentile);
    const auto it = ranked.find(id);
    const auto tactic = cluster_tactic(s, id, it == ranked.end() ? std::vector<std::string>{} : it->second.tokens);
    vs.tactic = std::string(label::label_name(tactic.value_or(label::PacketLabel::kUnknown)));
    vec_json.push_back(signature::to_json(vs));
  }

  std::vector<std::pair<std::string, std::size_t>> weighted;
  for (const auto& p : corpus.payloads) weighted.emplace_back(p.text, p.multiplicity());
  const auto curve = signature::coverage_curve(rules, weighted);
  std::ostringstream cov;
  cov.precision(17);
  cov << "rules,coverage\n";
  for (const auto& point : curve) cov << point.rule_count << ',' << point.fraction << '\n';

  ctx.write("signatures.json", sig_json.dump(1) + "\n");
  ctx.write("vector_signatures.json", vec_json.dump() + "\n");
  ctx.write("snort.rules", rules_text);
  ctx.write("coverage.csv", cov.str());
  if (config.rules_out) io::write_file_atomic(*config.rules_out, rules_text);
  ctx.count("clusters_with_signature", as_count(ranked.size()));
  ctx.count("rules", as_count(rules.size()));
  ctx.count("coverage_ppm", curve.empty() ? 0 : static_cast<std::int64_t>(curve.back().fraction * 1e6));
}

void run_label(StageContext& ctx) {
  const auto& config = ctx.config();
  const auto payloads = ingest::payloads_from_jsonl(ctx.read("payloads.jsonl"));
  const auto rules = signature::parse_rules(ctx.read("snort.rules"));
  std::map<std::uint32_t, label::PacketLabel> sid_to_label;
  for (const auto& r : rules) {
    const auto l = label::parse_label(r.tactic);
    if (!l) throw Error("rule " + std::to_string(r.sid) + " carries unknown tactic '" + r.tactic + "'");
    sid_to_label[r.sid] = *l;
  }

  std::vector<label::LogEntry> log;
  if (config.snort_log) {
    log = label::parse_snort_log(ctx.read_external(config.resolve(*config.snort_log)));
  } else {
    // Stand-in for running Snort over the capture: every rule that matches
    // a payload fires once per original packet.
    for (const auto& p : payloads) {
      const auto fired = signature::match_payload(rules, p.text);
      for (auto ts : p.origin_timestamps) {
        for (const auto* r : fired) log.push_back({ts, r->sid});
      }
    }
  }
  std::sort(log.begin(), log.end());
  log.erase(std::unique(log.begin(), log.end()), log.end());

  const auto joined = label::join_snort_log(log, payloads, sid_to_label);
  std::string flagged;
  for (const auto& f : joined.flagged) {
    std::vector<std::string> names;
    for (auto l : f.labels) names.emplace_back(label::label_name(l));
    json j = f.payload;
    j["labels"] = names;
    j["reason"] = f.reason;
    flagged += j.dump() + "\n";
  }
  ctx.write("snort_log.csv", label::snort_log_to_csv(log));
  ctx.write("labeled.jsonl", label::labeled_to_jsonl(joined.labeled));
  ctx.write("unlabeled.jsonl", ingest::payloads_to_jsonl(joined.unlabeled));
  ctx.write("flagged.jsonl", flagged);
  ctx.count("alerts", as_count(log.size()));
  ctx.count("labeled", as_count(joined.labeled.size()));
  ctx.count("unlabeled", as_count(joined.unlabeled.size()));
  ctx.count("flagged", as_count(joined.flagged.size()));
}

void run_train(StageContext& ctx) {
  const auto& config = ctx.config();
  const Corpus corpus = load_corpus(ctx);
  const auto labeled = label::labeled_from_jsonl(ctx.read("labeled.jsonl"));
  auto run = fit_head(labeled, corpus, config, ctx);
  const std::string model_text = classifier::to_json(run.model).dump() + "\n";
  ctx.write("head_model.json", model_text);
  ctx.write("train_metrics.json", run.report.dump(2) + "\n");
  if (config.model_out) io::write_file_atomic(*config.model_out, model_text);
}

void run_infer(StageContext& ctx) {
  const auto& config = ctx.config();
  const Corpus corpus = load_corpus(ctx);
  const auto labeled = label::labeled_from_jsonl(ctx.read("labeled.jsonl"));
  const auto unlabeled = ingest::payloads_from_jsonl(ctx.read("unlabeled.jsonl"));
  const auto model = classifier::head_from_json(json::parse(ctx.read("head_model.json")));
  if (model.backend_id != corpus.table.backend_id) {
    throw Error("head_model.json was trained on '" + model.backend_id + "' embeddings but embeddings.bin holds '" +
                corpus.table.backend_id + "'");
  }

  Matrix vectors(unlabeled.size(), corpus.table.vectors.cols());
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    const auto src = corpus.table.vectors.row(corpus.row(unlabeled[i].text));
    std::copy(src.begin(), src.end(), vectors.row(i).begin());
  }
  const auto inferred = label::pseudo_label(unlabeled, vectors, model, config.decision);

  std::vector<label::LabeledExample> dataset = labeled;
  std::map<std::string, std::int64_t> per_class;
  for (const auto& ex : inferred) {
    ++per_class[ex.decided.key()];
    if (ex.decided.labels().front() != label::PacketLabel::kUnknown) dataset.push_back(ex);
  }
  ctx.write("inferred.jsonl", label::labeled_to_jsonl(inferred));
  ctx.write("dataset.jsonl", label::labeled_to_jsonl(dataset));
  ctx.count("inferred", as_count(inferred.size()));
  ctx.count("dataset", as_count(dataset.size()));
  for (const auto& [key, n] : per_class) ctx.count("inferred:" + key, n);
}

void run_eval(StageContext& ctx) {
  const auto& config = ctx.config();
  const Corpus corpus = load_corpus(ctx);
  const auto assignments = cluster::assignments_from_csv(ctx.read("assignments.csv"));
  const auto dataset = label::labeled_from_jsonl(ctx.read("dataset.jsonl"));
  if (assignments.size() != corpus.payloads.size()) throw Error("assignments.csv does not match payloads.jsonl");

  auto run = fit_head(dataset, corpus, config, ctx);
  ctx.write("model_plus.json", classifier::to_json(run.model).dump() + "\n");

  const std::string table =
      run.test_metrics ? classifier::metrics_table(*run.test_metrics) : std::string("no test examples\n");
  ctx.write("metrics.json", run.report.dump(2) + "\n");
  ctx.write("metrics.txt", table);

  std::vector<std::string> labels(corpus.payloads.size());
  std::vector<std::uint32_t> labeled_clusters;
  std::vector<std::string> labeled_keys;
  for (const auto& ex : dataset) {
    const std::size_t row = corpus.row(ex.payload.text);
    labels[row] = ex.decided.key();
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty()) continue;
    labeled_clusters.push_back(assignments[i]);
    labeled_keys.push_back(labels[i]);
  }
  json purity = {{"points", labeled_keys.size()}, {"purity", nullptr}};
  if (!labeled_keys.empty()) purity["purity"] = cluster::purity(labeled_clusters, labeled_keys);
  ctx.write("purity.json", purity.dump(2) + "\n");
  ctx.write("embeddings_export.csv", cluster::export_embeddings_csv(corpus.table.vectors, assignments, labels));
  ctx.count("dataset", as_count(dataset.size()));
}

}  // namespace

void execute(Stage stage, StageContext& ctx) {
  switch (stage) {
    case Stage::kIngest: return run_ingest(ctx);
    case Stage::kEmbed: return run_embed(ctx);
    case Stage::kCluster: return run_cluster(ctx);
    case Stage::kSignature: return run_signature(ctx);
    case Stage::kLabel: return run_label(ctx);
    case Stage::kTrain: return run_train(ctx);
    case Stage::kInfer: return run_infer(ctx);
    case Stage::kEval: return run_eval(ctx);
  }
}

}  // namespace tacticforge::pipeline::detail
