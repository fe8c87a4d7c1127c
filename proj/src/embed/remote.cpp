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

#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tacticforge/common/error.hpp"
#include "tacticforge/embed/embedding.hpp"

namespace tacticforge::embed {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string prefix;  // path prefix without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos || url.compare(0, scheme, "http") != 0) {
    throw ConfigError("remote endpoint must be an http:// URL: " + url);
  }
  const auto path = url.find('/', scheme + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path);
  if (path != std::string::npos) {
    ep.prefix = url.substr(path);
    while (!ep.prefix.empty() && ep.prefix.back() == '/') ep.prefix.pop_back();
  }
  return ep;
}

// Issues `send` up to `attempts` times, doubling the pause after each
// transport failure or 5xx reply.
template <typename Send>
httplib::Result with_retries(const RemoteOptions& options, const std::string& what, Send send) {
  int backoff = options.initial_backoff_ms;
  std::string last_error = "no attempt made";
  for (int attempt = 1; attempt <= options.attempts; ++attempt) {
    httplib::Result res = send();
    if (res && res->status < 500) return res;
    last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
    if (attempt < options.attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  throw ProtocolError(what + " failed after " + std::to_string(options.attempts) +
                      " attempts: " + last_error);
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteOptions options) : options_(std::move(options)) {
  split_endpoint(options_.endpoint);
  if (options_.batch_limit == 0) throw ConfigError("remote batch limit must be positive");
  if (options_.attempts < 1) throw ConfigError("remote attempts must be at least 1");
}

std::vector<EmbeddingVector> RemoteBackend::embed(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += options_.batch_limit) {
    const std::size_t end = std::min(texts.size(), start + options_.batch_limit);
    std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                   texts.begin() + static_cast<std::ptrdiff_t>(end));
    auto part = embed_remote(batch);
    for (auto& v : part) out.push_back(std::move(v));
  }
  return out;
}

std::vector<EmbeddingVector> RemoteBackend::embed_remote(const std::vector<std::string>& batch) {
  if (batch.empty()) return {};
  if (batch.size() > options_.batch_limit) {
    throw std::invalid_argument("batch of " + std::to_string(batch.size()) +
                                " exceeds limit " + std::to_string(options_.batch_limit));
  }
  const Endpoint ep = split_endpoint(options_.endpoint);
  const std::string body = nlohmann::json{{"texts", batch}}.dump(
      -1, ' ', false, nlohmann::json::error_handler_t::replace);

  auto res = with_retries(options_, "POST /embed", [&] {
    httplib::Client client(ep.origin);
    client.set_connection_timeout(options_.timeout_s);
    client.set_read_timeout(options_.timeout_s);
    return client.Post(ep.prefix + "/embed", body, "application/json");
  });
  if (res->status != 200) {
    throw ProtocolError("POST /embed returned HTTP " + std::to_string(res->status));
  }

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("POST /embed returned invalid JSON: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("vectors") || !reply["vectors"].is_array()) {
    throw ProtocolError("POST /embed response lacks a \"vectors\" array");
  }
  const auto& vectors = reply["vectors"];
  if (vectors.size() != batch.size()) {
    throw ProtocolError("POST /embed returned " + std::to_string(vectors.size()) +
                        " vectors for " + std::to_string(batch.size()) + " texts");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(batch.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& row = vectors[i];
    EmbeddingVector v;
    v.backend_id = name();
    if (!row.is_array()) throw ProtocolError("vector " + std::to_string(i) + ": not an array");
    v.values.reserve(row.size());
    for (const auto& x : row) {
      if (!x.is_number()) {
        throw ProtocolError("vector " + std::to_string(i) + ": non-numeric component");
      }
      v.values.push_back(x.get<double>());
    }
    try {
      v.validate();
    } catch (const ProtocolError& e) {
      throw ProtocolError("vector " + std::to_string(i) + ": " + e.what());
    }
    out.push_back(std::move(v));
  }
  return out;
}

HealthStatus RemoteBackend::health() {
  const Endpoint ep = split_endpoint(options_.endpoint);
  auto res = with_retries(options_, "GET /health", [&] {
    httplib::Client client(ep.origin);
    client.set_connection_timeout(options_.timeout_s);
    client.set_read_timeout(options_.timeout_s);
    return client.Get(ep.prefix + "/health");
  });
  if (res->status != 200) {
    throw ProtocolError("GET /health returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    return {j.at("status").get<std::string>(), j.at("model").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("GET /health: malformed response: ") + e.what());
  }
}

}  // namespace tacticforge::embed
