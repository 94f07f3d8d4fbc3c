#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kpeval/embedding.hpp"
#include "kpeval/quality.hpp"
#include "kpeval/retrieval.hpp"

namespace kpeval {

// JSON-over-HTTP client for the model sidecar:
//   POST /embed  {"phrases": [s]}                       -> {"dim": n, "vectors": [[x]]}
//   POST /score  {"items": [{"dimension", "prompt"}]}   -> {"scores": [{"p_yes", "p_no"}]}
//   POST /rerank {"query", "candidates": [{"id","text"}]} -> {"ranked": [{"id","score"}]}
//   GET  /health                                        -> {"ready": b, "models": [s]}
// Connection failures raise Error(kProviderUnavailable); non-200 responses
// and malformed bodies raise Error(kProviderProtocol).
class SidecarClient {
 public:
  explicit SidecarClient(std::string base_url,
                         std::chrono::milliseconds timeout = std::chrono::seconds(60));

  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;
  nlohmann::json get(const std::string& path) const;

  const std::string& base_url() const noexcept { return base_url_; }

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

struct HealthStatus {
  bool ready = false;
  std::vector<std::string> models;
};

HealthStatus check_health(const SidecarClient& client);

class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(SidecarClient client, size_t max_batch = 64);

  ProviderKind kind() const override { return ProviderKind::kHttp; }
  std::string identity() const override { return "http:" + client_.base_url() + "/embed"; }

 protected:
  std::vector<EmbeddingVector> fetch(std::span<const std::string> texts) override;

 private:
  SidecarClient client_;
  size_t max_batch_;
};

class HttpScoreProvider final : public ScoreProvider {
 public:
  explicit HttpScoreProvider(SidecarClient client, size_t max_batch = 32);

  std::vector<YesNo> score(std::span<const QualityPrompt> prompts) override;
  std::string identity() const override { return "http:" + client_.base_url() + "/score"; }

 private:
  SidecarClient client_;
  size_t max_batch_;
};

class HttpReranker final : public Reranker {
 public:
  explicit HttpReranker(SidecarClient client) : client_(std::move(client)) {}

  std::vector<RankedEntry> rerank(std::string_view query,
                                  std::span<const RerankCandidate> candidates) override;
  std::string identity() const override { return "http:" + client_.base_url() + "/rerank"; }

 private:
  SidecarClient client_;
};

}  // namespace kpeval
