#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kpeval/dataset.hpp"
#include "kpeval/embedding.hpp"

namespace kpeval {

struct RankedEntry {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

// Descending by score, ties by ascending doc_id; doc ids distinct.
struct RankedList {
  std::vector<RankedEntry> entries;

  // 1-based rank of `doc_id`, if present.
  std::optional<size_t> rank_of(std::string_view doc_id) const;

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

// Sorts by (score desc, doc_id asc) and keeps the first k.
RankedList top_k(std::vector<RankedEntry> scored, size_t k);

enum class RetrieverKind { kBm25, kDense, kRerank };

std::string_view to_string(RetrieverKind kind);

class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual RetrieverKind kind() const = 0;
  virtual bool contains(std::string_view doc_id) const = 0;
  // Throws Error(kEmptyQuery) when the query has no content and
  // Error(kInvalidArgument) when k == 0.
  virtual RankedList retrieve(std::string_view query, size_t k) const = 0;
};

// Hash over (id, text) of every corpus document, in order.
std::string corpus_hash(std::span<const CorpusDoc> docs);

// Lowercased, punctuation-stripped Porter stems.
std::vector<std::string> analyze(std::string_view text);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

// Okapi BM25 over stemmed tokens:
//   score(q, d) = sum_{t in q} idf(t) * tf (k1 + 1) / (tf + k1 (1 - b + b |d| / avgdl))
//   idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
// Query terms are summed per occurrence. Documents sharing no term with the
// query are not retrieved.
class Bm25Index final : public Retriever {
 public:
  // Throws Error(kEmptyCorpus) for an empty corpus, kDuplicateId for repeats.
  static Bm25Index build(std::span<const CorpusDoc> docs, Bm25Params params = {});

  RetrieverKind kind() const override { return RetrieverKind::kBm25; }
  bool contains(std::string_view doc_id) const override;
  RankedList retrieve(std::string_view query, size_t k) const override;

  size_t doc_count() const noexcept { return doc_ids_.size(); }
  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  size_t document_frequency(std::string_view term) const;
  size_t doc_length(size_t index) const { return doc_lengths_.at(index); }
  double average_length() const noexcept { return avg_length_; }
  const Bm25Params& params() const noexcept { return params_; }
  double idf(std::string_view term) const;

  void save(const std::filesystem::path& path, std::string_view corpus_hash) const;
  // Throws Error(kConfig) when the file is for another corpus or format.
  static Bm25Index load(const std::filesystem::path& path, std::string_view expected_corpus_hash);

  friend bool operator==(const Bm25Index& a, const Bm25Index& b);

 private:
  Bm25Index() = default;
  void finalize();

  Bm25Params params_;
  std::vector<std::string> doc_ids_;
  std::vector<size_t> doc_lengths_;
  std::vector<std::map<std::string, uint32_t>> doc_terms_;
  std::map<std::string, size_t, std::less<>> df_;
  std::unordered_map<std::string, std::vector<std::pair<size_t, uint32_t>>> postings_;
  std::unordered_map<std::string, size_t> id_index_;
  double avg_length_ = 0.0;
};

// Exact cosine search over document embeddings.
class DenseIndex final : public Retriever {
 public:
  // Each document is embedded from its text cut to `token_budget` tokens.
  static DenseIndex build(std::span<const CorpusDoc> docs,
                          std::shared_ptr<EmbeddingProvider> provider,
                          size_t token_budget = 512);

  RetrieverKind kind() const override { return RetrieverKind::kDense; }
  bool contains(std::string_view doc_id) const override;
  RankedList retrieve(std::string_view query, size_t k) const override;

  size_t doc_count() const noexcept { return doc_ids_.size(); }
  const std::vector<EmbeddingVector>& vectors() const noexcept { return vectors_; }

  void save(const std::filesystem::path& path, std::string_view corpus_hash) const;
  static DenseIndex load(const std::filesystem::path& path, std::string_view expected_corpus_hash,
                         std::shared_ptr<EmbeddingProvider> provider);

 private:
  DenseIndex() = default;

  std::shared_ptr<EmbeddingProvider> provider_;
  std::vector<std::string> doc_ids_;
  std::vector<EmbeddingVector> vectors_;
  std::unordered_map<std::string, size_t> id_index_;
  size_t token_budget_ = 512;
};

struct RerankCandidate {
  std::string id;
  std::string text;
};

// Pairwise (query, document) scorer, e.g. a cross-encoder.
class Reranker {
 public:
  virtual ~Reranker() = default;
  virtual std::vector<RankedEntry> rerank(std::string_view query,
                                          std::span<const RerankCandidate> candidates) = 0;
  virtual std::string identity() const = 0;
};

// Re-scores the dense retriever's top `depth` documents with a Reranker.
class RerankRetriever final : public Retriever {
 public:
  RerankRetriever(std::shared_ptr<const DenseIndex> dense, std::shared_ptr<Reranker> reranker,
                  std::span<const CorpusDoc> docs, size_t token_budget = 512,
                  size_t depth = 100);

  RetrieverKind kind() const override { return RetrieverKind::kRerank; }
  bool contains(std::string_view doc_id) const override;
  RankedList retrieve(std::string_view query, size_t k) const override;

 private:
  std::shared_ptr<const DenseIndex> dense_;
  std::shared_ptr<Reranker> reranker_;
  std::unordered_map<std::string, std::string> texts_;
  size_t depth_;
};

}  // namespace kpeval
