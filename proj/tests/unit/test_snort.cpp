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

#include "support.hpp"
#include "tacticforge/common/error.hpp"
#include "tacticforge/common/io.hpp"
#include "tacticforge/signature/signature.hpp"

using namespace tacticforge;
using namespace tacticforge::signature;

namespace {

ByteSignature sig(std::size_t id, std::vector<std::string> tokens) {
  ByteSignature s;
  s.cluster_id = id;
  s.tokens = std::move(tokens);
  s.weights.assign(s.tokens.size(), 1.0);
  return s;
}

SnortRule rule(std::uint32_t sid, std::vector<std::string> contents) {
  SnortRule r;
  r.sid = sid;
  r.tactic = "Execution";
  r.contents = std::move(contents);
  return r;
}

}  // namespace

TEST_CASE("rule text matches the golden file byte for byte") {
  const std::vector<ByteSignature> sigs = {
      sig(0, {"php", "login"}),
      sig(7, {"wget", "chmod", "tmp", "mozi", "sh", "bin"}),
      sig(3, {"a\"b", "x;y|z", "back\\slash"}),
  };
  const std::map<std::size_t, std::string> tactics = {{0, "Reconnaissance"}, {7, "Execution"}, {3, "Non-attack"}};
  const std::string text = emit_snort_rules(sigs, tactics);
  CHECK(text == io::read_file(tftest::fixture_dir() / "golden_rules.txt"));

  const auto rules = parse_rules(text);
  REQUIRE(rules.size() == 3);
  CHECK(rules[2].contents == std::vector<std::string>{"a\"b", "x;y|z", "back\\slash"});
  CHECK(rules[2].tactic == "Non-attack");
  CHECK(rules[1].cluster_id == 7);
  CHECK(rules[1].contents.size() == 4);
  CHECK(rules_to_text(rules) == text);

  CHECK_THROWS_WITH_AS(make_rules({sig(4, {"x"})}, tactics), "no tactic mapping for cluster 4", std::invalid_argument);
}

TEST_CASE("content escaping round-trips every byte") {
  CHECK(escape_content("a\"b") == "a|22|b");
  CHECK(escape_content(std::string("\x00\xff", 2)) == "|00||FF|");
  CHECK(unescape_content("|22 3B|x") == "\";x");
  CHECK_THROWS(unescape_content("|2"));
  CHECK_THROWS(unescape_content("|2|"));
  CHECK_THROWS(unescape_content("|zz|"));
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    std::string raw;
    const std::size_t n = rng.index(20);
    for (std::size_t j = 0; j < n; ++j) raw.push_back(static_cast<char>(rng.index(256)));
    const std::string esc = escape_content(raw);
    CHECK(esc.find('"') == std::string::npos);
    CHECK(esc.find(';') == std::string::npos);
    CHECK(unescape_content(esc) == raw);
  }
}

TEST_CASE("rule parser rejects foreign shapes") {
  CHECK_THROWS(SnortRule::parse("alert udp any any -> any 80 (msg:\"PELAT c0 X\"; content:\"a\"; sid:1; rev:1;)"));
  CHECK_THROWS(SnortRule::parse("alert tcp any any -> any 80 (msg:\"PELAT c0 X\"; sid:1; rev:1;)"));
  CHECK_THROWS(SnortRule::parse("alert tcp any any -> any 80 (msg:\"PELAT c0 X\"; content:\"a\"; pcre:\"/x/\"; sid:1; rev:1;)"));
  CHECK_THROWS(SnortRule::parse("alert tcp any any -> any 80 (msg:\"PELAT c0 X\"; content:\"a; sid:1; rev:1;)"));
}

TEST_CASE("byte matching examples") {
  const std::vector<SnortRule> rules = {rule(1000001, {"php", "login"}), rule(1000000, {"php"})};
  const auto hits = match_payload(rules, "get /login.php");
  REQUIRE(hits.size() == 2);
  CHECK(hits[0]->sid == 1000000);
  CHECK(hits[1]->sid == 1000001);
  CHECK(match_payload(rules, "get /").empty());
  // Case folding applies to the payload; contents are lowercase tokens.
  CHECK(match_payload(rules, "GET /LOGIN.PHP").size() == 2);
  CHECK(fold_case("AbC-\xC3\x89") == "abc-\xC3\x89");
}

TEST_CASE("vector matching is inclusive at the radius") {
  VectorSignature a{0, {0.0, 0.0}, 1.0, "Execution"};
  VectorSignature b{4, {3.0, 0.0}, 0.5, "Discovery"};
  const std::vector<VectorSignature> sigs = {b, a};
  const double eps = 1e-9;
  CHECK(match_vector(sigs, std::vector<double>{1.0 - eps, 0.0}).size() == 1);
  CHECK(match_vector(sigs, std::vector<double>{1.0, 0.0}).size() == 1);
  CHECK(match_vector(sigs, std::vector<double>{1.0 + eps, 0.0}).empty());
  const std::vector<VectorSignature> wide = {VectorSignature{4, {0, 0}, 5, ""}, a};
  const auto both = match_vector(wide, std::vector<double>{0.5, 0});
  REQUIRE(both.size() == 2);
  CHECK(both[0]->cluster_id == 0);

  const auto back = vector_signature_from_json(to_json(b));
  CHECK(back.centroid == b.centroid);
  CHECK(back.radius == b.radius);
  CHECK(back.tactic == "Discovery");
  CHECK(back.cluster_id == 4);
}

TEST_CASE("vector signature radius is the nearest-rank percentile") {
  CHECK(percentile_nearest_rank({5, 1, 3, 2, 4}, 100) == 5);
  CHECK(percentile_nearest_rank({5, 1, 3, 2, 4}, 50) == 3);
  CHECK(percentile_nearest_rank({5, 1, 3, 2, 4}, 0) == 1);
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  CHECK(percentile_nearest_rank(hundred, 95) == 95);
  CHECK_THROWS(percentile_nearest_rank({}, 95));
  CHECK_THROWS(percentile_nearest_rank({1}, 101));

  cluster::ClusterModel m;
  m.centroids = Matrix(2, 1);
  m.centroids(1, 0) = 10;
  Matrix pts(4, 1);
  pts(0, 0) = 1;
  pts(1, 0) = -2;
  pts(2, 0) = 10;
  pts(3, 0) = 3;
  m.assignments = {0, 0, 1, 0};
  const auto vs = make_vector_signature(m, pts, 0, 95);
  CHECK(vs.radius == 3.0);
  CHECK(vs.centroid == std::vector<double>{0.0});
  CHECK(make_vector_signature(m, pts, 1, 95).radius == 0.0);
  CHECK_THROWS(make_vector_signature(m, pts, 2, 95));
}

TEST_CASE("coverage curve examples and monotonicity") {
  const std::vector<SnortRule> all = {rule(1, {"/"})};
  const std::vector<std::pair<std::string, std::size_t>> payloads = {{"get /a", 3}, {"get /b", 2}};
  const auto one = coverage_curve(all, payloads);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == CoveragePoint{1, 1.0});

  const std::vector<SnortRule> two = {rule(1, {"a"}), rule(2, {"b"})};
  const auto curve = coverage_curve(two, {{"a", 6}, {"b", 3}, {"c", 1}});
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].fraction == 0.6);
  CHECK(curve[1].fraction == 0.9);

  CHECK(coverage_curve(two, {})[1].fraction == 0.0);

  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SnortRule> rules;
    for (std::uint32_t r = 0; r < 1 + rng.index(6); ++r) rules.push_back(rule(r, {std::string(1, static_cast<char>('a' + rng.index(6)))}));
    std::vector<std::pair<std::string, std::size_t>> ps;
    for (int i = 0; i < 20; ++i) ps.emplace_back(std::string(1, static_cast<char>('a' + rng.index(8))), 1 + rng.index(5));
    const auto c = coverage_curve(rules, ps);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].fraction >= c[i - 1].fraction);
    // Order of payloads does not matter.
    auto shuffled = ps;
    rng.shuffle(shuffled);
    CHECK(coverage_curve(rules, shuffled) == c);
  }
}

TEST_CASE("each cluster rule matches its own payloads that contain its tokens") {
  Rng rng(43);
  const std::vector<std::string> words = {"GET", "POST", "/admin", "/wp-login.php", "cmd=id", "wget", "Shell", "passwd", "x.cgi"};
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::size_t, std::vector<std::string>> corpus;
    for (std::size_t c = 0; c < 4; ++c) {
      for (int i = 0; i < 5; ++i) {
        std::string t;
        for (int w = 0; w < 4; ++w) t += words[rng.index(words.size())] + " ";
        corpus[c].push_back(t);
      }
    }
    const auto ranked = tfidf_rank(corpus, 8);
    std::vector<ByteSignature> sigs;
    std::map<std::size_t, std::string> tactics;
    for (const auto& [id, s] : ranked) {
      sigs.push_back(s);
      tactics[id] = "Execution";
    }
    const auto rules = make_rules(sigs, tactics);
    for (const auto& r : rules) {
      for (const auto& text : corpus.at(r.cluster_id)) {
        const auto toks = tokenize(text);
        const bool has_all = std::all_of(r.contents.begin(), r.contents.end(), [&](const auto& c) {
          return std::find(toks.begin(), toks.end(), c) != toks.end();
        });
        if (!has_all) continue;
        const auto hits = match_payload(rules, text);
        CHECK(std::find(hits.begin(), hits.end(), &r) != hits.end());
      }
    }
  }
}
