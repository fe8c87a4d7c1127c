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

#include <charconv>
#include <sstream>

#include "tacticforge/cluster/cluster.hpp"
#include "tacticforge/common/error.hpp"
#include "tacticforge/common/io.hpp"

namespace tacticforge::cluster {

double purity(std::span<const std::uint32_t> assignments, std::span<const std::string> labels) {
  if (assignments.size() != labels.size()) throw std::invalid_argument("purity: length mismatch");
  std::map<std::size_t, std::uint32_t> a;
  std::map<std::size_t, std::string> l;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    a.emplace(i, assignments[i]);
    l.emplace(i, labels[i]);
  }
  return purity(a, l);
}

nlohmann::json model_to_json(const ClusterModel& model) {
  nlohmann::json centroids = nlohmann::json::array();
  for (std::size_t c = 0; c < model.k(); ++c) {
    const auto row = model.centroids.row(c);
    centroids.push_back(std::vector<double>(row.begin(), row.end()));
  }
  nlohmann::json j{{"algorithm", model.algorithm},
                   {"k", model.k()},
                   {"seed", model.seed},
                   {"metric", "euclidean"},
                   {"inertia", model.inertia},
                   {"iterations", model.iterations},
                   {"centroids", std::move(centroids)}};
  if (model.algorithm == "som") j["grid"] = {model.grid_rows, model.grid_cols};
  return j;
}

ClusterModel model_from_json(const nlohmann::json& j) {
  ClusterModel m;
  m.algorithm = j.at("algorithm").get<std::string>();
  if (j.at("metric").get<std::string>() != "euclidean") throw Error("unsupported cluster metric");
  m.seed = j.at("seed").get<std::uint64_t>();
  m.inertia = j.value("inertia", 0.0);
  m.iterations = j.value("iterations", std::size_t{0});
  if (j.contains("grid")) {
    m.grid_rows = j["grid"].at(0).get<std::size_t>();
    m.grid_cols = j["grid"].at(1).get<std::size_t>();
  }
  for (const auto& row : j.at("centroids")) m.centroids.append_row(row.get<std::vector<double>>());
  if (m.k() != j.at("k").get<std::size_t>()) throw Error("cluster model: k does not match centroids");
  return m;
}

std::string assignments_to_csv(const std::vector<std::uint32_t>& assignments) {
  std::string out = "payload_id,cluster_id\n";
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    out += std::to_string(i) + "," + std::to_string(assignments[i]) + "\n";
  }
  return out;
}

std::vector<std::uint32_t> assignments_from_csv(std::string_view text) {
  std::vector<std::uint32_t> out;
  const auto lines = io::split_lines(text);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.empty()) continue;
    const auto comma = line.find(',');
    std::size_t id = 0;
    std::uint32_t cluster = 0;
    const char* mid = line.data() + comma;
    if (comma == std::string::npos ||
        std::from_chars(line.data(), mid, id).ec != std::errc{} ||
        std::from_chars(mid + 1, line.data() + line.size(), cluster).ec != std::errc{} ||
        id != out.size()) {
      throw Error("assignments: bad line " + std::to_string(i + 1));
    }
    out.push_back(cluster);
  }
  return out;
}

std::string export_embeddings_csv(const Matrix& points, const std::vector<std::uint32_t>& clusters,
                                  const std::vector<std::string>& labels) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t d = 0; d < points.cols(); ++d) out << "v" << d << ",";
  out << "cluster,label\n";
  for (std::size_t i = 0; i < points.rows(); ++i) {
    for (double v : points.row(i)) out << v << ",";
    out << (i < clusters.size() ? std::to_string(clusters[i]) : "") << ","
        << (i < labels.size() ? labels[i] : "") << "\n";
  }
  return out.str();
}

}  // namespace tacticforge::cluster
