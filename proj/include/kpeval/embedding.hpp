#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kpeval {

// Fixed-dimension real vector with finite components and non-zero norm.
class EmbeddingVector {
 public:
  // Throws Error(kInvalidArgument) on an empty vector, kNonFinite on NaN/inf
  // components and kZeroNorm on the zero vector.
  explicit EmbeddingVector(std::vector<double> components);

  size_t dim() const noexcept { return components_.size(); }
  std::span<const double> components() const noexcept { return components_; }
  double operator[](size_t i) const { return components_[i]; }
  double norm() const noexcept { return norm_; }

  friend bool operator==(const EmbeddingVector& a, const EmbeddingVector& b) {
    return a.components_ == b.components_;
  }

 private:
  std::vector<double> components_;
  double norm_ = 0.0;
};

// dot(a,b) / (|a| |b|), clamped to [-1, 1]. Throws kDimMismatch.
double cos_sim(const EmbeddingVector& a, const EmbeddingVector& b);

// Elementwise maximum of a set of vectors (the set representation used for
// coverage). Throws kEmptySet, kDimMismatch, or kZeroNorm if the pooled
// vector vanishes.
EmbeddingVector max_pool_union(std::span<const EmbeddingVector> vectors);

enum class ProviderKind { kFile, kHttp };

// Source of phrase embeddings. embed() memoizes by exact text for the
// lifetime of the provider, so repeated lookups return identical vectors.
// Safe to call from several threads.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  // One vector per text, in order. Texts must be non-empty.
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts);
  EmbeddingVector embed_one(const std::string& text);

  virtual ProviderKind kind() const = 0;
  // Human-readable origin, recorded in report metadata.
  virtual std::string identity() const = 0;

  size_t cache_size() const;

 protected:
  // Computes vectors for texts not yet cached. Called without the cache lock.
  virtual std::vector<EmbeddingVector> fetch(std::span<const std::string> texts) = 0;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> cache_;
  size_t dim_ = 0;
};

// File-backed provider: a fixed phrase -> vector table. Unknown phrases are an
// error, never a silent zero.
class TableEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit TableEmbeddingProvider(std::map<std::string, EmbeddingVector> table,
                                  std::string origin = "table");

  // Line-delimited records {"phrase": string, "vector": [number]}.
  static std::unique_ptr<TableEmbeddingProvider> load(const std::filesystem::path& path);

  ProviderKind kind() const override { return ProviderKind::kFile; }
  std::string identity() const override { return "file:" + origin_; }
  size_t dim() const noexcept { return dim_; }
  size_t size() const noexcept { return table_.size(); }

 protected:
  std::vector<EmbeddingVector> fetch(std::span<const std::string> texts) override;

 private:
  std::map<std::string, EmbeddingVector> table_;
  std::string origin_;
  size_t dim_ = 0;
};

}  // namespace kpeval
