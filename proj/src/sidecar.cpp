#include "kpeval/sidecar.hpp"

#include <algorithm>

#include <httplib.h>

#include "kpeval/error.hpp"

namespace kpeval {
namespace {

using json = nlohmann::json;

json parse_body(const std::string& url, const httplib::Result& res) {
  if (!res) {
    throw Error(ErrorCode::kProviderUnavailable,
                url + " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProviderProtocol,
                url + " answered HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  json body = json::parse(res->body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error(ErrorCode::kProviderProtocol, url + " returned a non-JSON body");
  }
  return body;
}

const json& field(const json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) {
    throw Error(ErrorCode::kProviderProtocol, where + " response lacks '" + name + "'");
  }
  return *it;
}

template <typename T>
std::vector<std::span<const T>> batches(std::span<const T> items, size_t max_batch) {
  std::vector<std::span<const T>> out;
  for (size_t i = 0; i < items.size(); i += max_batch) {
    out.push_back(items.subspan(i, std::min(max_batch, items.size() - i)));
  }
  return out;
}

}  // namespace

SidecarClient::SidecarClient(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.rfind("http://", 0) != 0) {
    throw Error(ErrorCode::kConfig, "sidecar URL must start with http://, got '" + base_url_ + "'");
  }
}

json SidecarClient::post(const std::string& path, const json& body) const {
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  cli.set_write_timeout(timeout_);
  return parse_body(base_url_ + path, cli.Post(path, body.dump(), "application/json"));
}

json SidecarClient::get(const std::string& path) const {
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  return parse_body(base_url_ + path, cli.Get(path));
}

HealthStatus check_health(const SidecarClient& client) {
  const json body = client.get("/health");
  HealthStatus status;
  try {
    status.ready = field(body, "ready", "/health").get<bool>();
    status.models = field(body, "models", "/health").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProviderProtocol, std::string("/health: ") + e.what());
  }
  return status;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(SidecarClient client, size_t max_batch)
    : client_(std::move(client)), max_batch_(std::max<size_t>(1, max_batch)) {}

std::vector<EmbeddingVector> HttpEmbeddingProvider::fetch(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto batch : batches(texts, max_batch_)) {
    const json body = client_.post(
        "/embed", json{{"phrases", std::vector<std::string>(batch.begin(), batch.end())}});
    try {
      const size_t dim = field(body, "dim", "/embed").get<size_t>();
      const json& vectors = field(body, "vectors", "/embed");
      if (!vectors.is_array() || vectors.size() != batch.size()) {
        throw Error(ErrorCode::kProviderProtocol, "/embed returned the wrong number of vectors");
      }
      for (const auto& v : vectors) {
        EmbeddingVector vec(v.get<std::vector<double>>());
        if (vec.dim() != dim) {
          throw Error(ErrorCode::kProviderProtocol, "/embed vector length differs from 'dim'");
        }
        out.push_back(std::move(vec));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kProviderProtocol, std::string("/embed: ") + e.what());
    }
  }
  return out;
}

HttpScoreProvider::HttpScoreProvider(SidecarClient client, size_t max_batch)
    : client_(std::move(client)), max_batch_(std::max<size_t>(1, max_batch)) {}

std::vector<YesNo> HttpScoreProvider::score(std::span<const QualityPrompt> prompts) {
  std::vector<YesNo> out;
  out.reserve(prompts.size());
  for (auto batch : batches(prompts, max_batch_)) {
    json items = json::array();
    for (const auto& p : batch) {
      items.push_back({{"dimension", std::string(to_string(p.dimension))}, {"prompt", p.text}});
    }
    const json body = client_.post("/score", json{{"items", items}});
    try {
      const json& scores = field(body, "scores", "/score");
      if (!scores.is_array() || scores.size() != batch.size()) {
        throw Error(ErrorCode::kProviderProtocol, "/score returned the wrong number of scores");
      }
      for (const auto& s : scores) {
        out.push_back({s.at("p_yes").get<double>(), s.at("p_no").get<double>()});
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kProviderProtocol, std::string("/score: ") + e.what());
    }
  }
  return out;
}

std::vector<RankedEntry> HttpReranker::rerank(std::string_view query,
                                              std::span<const RerankCandidate> candidates) {
  json cands = json::array();
  for (const auto& c : candidates) cands.push_back({{"id", c.id}, {"text", c.text}});
  const json body = client_.post("/rerank", json{{"query", std::string(query)}, {"candidates", cands}});
  std::vector<RankedEntry> out;
  try {
    for (const auto& r : field(body, "ranked", "/rerank")) {
      out.push_back({r.at("id").get<std::string>(), r.at("score").get<double>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProviderProtocol, std::string("/rerank: ") + e.what());
  }
  return out;
}

}  // namespace kpeval
