#include "kpeval/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "kpeval/dataset.hpp"
#include "kpeval/error.hpp"

namespace kpeval {

EmbeddingVector::EmbeddingVector(std::vector<double> components)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "embedding has dimension 0");
  }
  double sq = 0.0;
  for (double c : components_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::kNonFinite, "non-finite embedding component");
    sq += c * c;
  }
  norm_ = std::sqrt(sq);
  if (!(norm_ > 0.0)) throw Error(ErrorCode::kZeroNorm, "zero-norm embedding");
}

double cos_sim(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimMismatch, "cos_sim of dims " + std::to_string(a.dim()) +
                                             " and " + std::to_string(b.dim()));
  }
  double dot = 0.0;
  for (size_t i = 0; i < a.dim(); ++i) dot += a[i] * b[i];
  return std::clamp(dot / (a.norm() * b.norm()), -1.0, 1.0);
}

EmbeddingVector max_pool_union(std::span<const EmbeddingVector> vectors) {
  if (vectors.empty()) throw Error(ErrorCode::kEmptySet, "union of an empty set");
  std::vector<double> pooled(vectors.front().components().begin(),
                             vectors.front().components().end());
  for (const auto& v : vectors.subspan(1)) {
    if (v.dim() != pooled.size()) {
      throw Error(ErrorCode::kDimMismatch, "union over mixed dimensions");
    }
    for (size_t i = 0; i < pooled.size(); ++i) pooled[i] = std::max(pooled[i], v[i]);
  }
  return EmbeddingVector(std::move(pooled));
}

std::vector<EmbeddingVector> EmbeddingProvider::embed(std::span<const std::string> texts) {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mu_);
    std::unordered_set<std::string_view> queued;
    for (const auto& t : texts) {
      if (t.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot embed empty text");
      if (!cache_.contains(t) && queued.insert(t).second) missing.push_back(t);
    }
  }
  if (!missing.empty()) {
    std::vector<EmbeddingVector> fetched = fetch(missing);
    if (fetched.size() != missing.size()) {
      throw Error(ErrorCode::kProviderProtocol,
                  identity() + " returned " + std::to_string(fetched.size()) +
                      " vectors for " + std::to_string(missing.size()) + " texts");
    }
    std::lock_guard lock(mu_);
    for (size_t i = 0; i < missing.size(); ++i) {
      if (dim_ == 0) dim_ = fetched[i].dim();
      if (fetched[i].dim() != dim_) {
        throw Error(ErrorCode::kDimMismatch,
                    identity() + " returned mixed dimensions for '" + missing[i] + "'");
      }
      cache_.emplace(missing[i], std::move(fetched[i]));
    }
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  std::lock_guard lock(mu_);
  for (const auto& t : texts) out.push_back(cache_.at(t));
  return out;
}

EmbeddingVector EmbeddingProvider::embed_one(const std::string& text) {
  return embed(std::span<const std::string>(&text, 1)).front();
}

size_t EmbeddingProvider::cache_size() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

TableEmbeddingProvider::TableEmbeddingProvider(std::map<std::string, EmbeddingVector> table,
                                               std::string origin)
    : table_(std::move(table)), origin_(std::move(origin)) {
  for (const auto& [phrase, vec] : table_) {
    if (dim_ == 0) dim_ = vec.dim();
    if (vec.dim() != dim_) {
      throw Error(ErrorCode::kDimMismatch, "embedding table mixes dimensions at '" + phrase + "'");
    }
  }
}

std::unique_ptr<TableEmbeddingProvider> TableEmbeddingProvider::load(const std::filesystem::path& path) {
  using json = nlohmann::json;
  const std::string content = read_file(path);
  std::map<std::string, EmbeddingVector> table;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    const std::string_view line = std::string_view(content).substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("phrase") ||
        !rec.contains("vector") || !rec["phrase"].is_string() || !rec["vector"].is_array()) {
      throw Error(ErrorCode::kParseError, where + ": expected {\"phrase\": string, \"vector\": [number]}");
    }
    std::vector<double> comps;
    for (const auto& c : rec["vector"]) {
      if (!c.is_number()) throw Error(ErrorCode::kParseError, where + ": non-numeric component");
      comps.push_back(c.get<double>());
    }
    try {
      table.insert_or_assign(rec["phrase"].get<std::string>(), EmbeddingVector(std::move(comps)));
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.message());
    }
  }
  return std::make_unique<TableEmbeddingProvider>(std::move(table), path.string());
}

std::vector<EmbeddingVector> TableEmbeddingProvider::fetch(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = table_.find(t);
    if (it == table_.end()) {
      throw Error(ErrorCode::kMissingEmbedding, "no embedding for '" + t + "' in " + origin_);
    }
    out.push_back(it->second);
  }
  return out;
}

}  // namespace kpeval
