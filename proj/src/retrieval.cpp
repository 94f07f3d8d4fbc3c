#include "kpeval/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "kpeval/error.hpp"
#include "kpeval/hashing.hpp"
#include "kpeval/porter_stemmer.hpp"

namespace kpeval {
namespace {

using json = nlohmann::json;

constexpr std::string_view kIndexFormat = "kpeval-index";
constexpr int kIndexVersion = 1;

void require_k(size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
}

json make_header(RetrieverKind kind, std::string_view hash) {
  return {{"format", kIndexFormat},
          {"version", kIndexVersion},
          {"kind", std::string(to_string(kind))},
          {"corpus_hash", std::string(hash)}};
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::vector<json> records;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    const std::string_view line = std::string_view(content).substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      throw Error(ErrorCode::kParseError, path.string() + ": corrupt index record");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// Returns the header after checking format, version, kind and corpus hash.
json check_header(const std::vector<json>& records, const std::filesystem::path& path,
                  RetrieverKind kind, std::string_view expected_hash) {
  if (records.empty() || !records.front().is_object() ||
      records.front().value("format", "") != kIndexFormat) {
    throw Error(ErrorCode::kConfig, path.string() + " is not an index cache file");
  }
  const json& h = records.front();
  if (h.value("version", -1) != kIndexVersion) {
    throw Error(ErrorCode::kConfig, path.string() + ": unsupported index version");
  }
  if (h.value("kind", "") != to_string(kind)) {
    throw Error(ErrorCode::kConfig, path.string() + ": index kind is " + h.value("kind", "?"));
  }
  if (h.value("corpus_hash", "") != expected_hash) {
    throw Error(ErrorCode::kConfig, path.string() + ": stale index (corpus hash changed)");
  }
  return h;
}

std::unordered_map<std::string, size_t> index_ids(const std::vector<std::string>& ids) {
  std::unordered_map<std::string, size_t> out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (!out.emplace(ids[i], i).second) {
      throw Error(ErrorCode::kDuplicateId, "corpus repeats document '" + ids[i] + "'");
    }
  }
  return out;
}

}  // namespace

std::optional<size_t> RankedList::rank_of(std::string_view doc_id) const {
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].doc_id == doc_id) return i + 1;
  }
  return std::nullopt;
}

RankedList top_k(std::vector<RankedEntry> scored, size_t k) {
  auto better = [](const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  };
  if (scored.size() > k) {
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                      scored.end(), better);
    scored.resize(k);
  } else {
    std::sort(scored.begin(), scored.end(), better);
  }
  return RankedList{std::move(scored)};
}

std::string_view to_string(RetrieverKind kind) {
  switch (kind) {
    case RetrieverKind::kBm25: return "bm25";
    case RetrieverKind::kDense: return "dense";
    case RetrieverKind::kRerank: return "rerank";
  }
  return "unknown";
}

std::string corpus_hash(std::span<const CorpusDoc> docs) {
  Fnv1a h;
  for (const auto& d : docs) h.field(d.id).field(d.text);
  return h.hex();
}

std::vector<std::string> analyze(std::string_view text) {
  auto tokens = tokenize(text);
  for (auto& t : tokens) t = porter_stem(t);
  return tokens;
}

// ---- BM25 ----

Bm25Index Bm25Index::build(std::span<const CorpusDoc> docs, Bm25Params params) {
  if (docs.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot index an empty corpus");
  Bm25Index index;
  index.params_ = params;
  for (const auto& doc : docs) {
    const auto terms = analyze(doc.text);
    std::map<std::string, uint32_t> tf;
    for (const auto& t : terms) ++tf[t];
    index.doc_ids_.push_back(doc.id);
    index.doc_lengths_.push_back(terms.size());
    index.doc_terms_.push_back(std::move(tf));
  }
  index.finalize();
  return index;
}

void Bm25Index::finalize() {
  id_index_ = index_ids(doc_ids_);
  df_.clear();
  postings_.clear();
  size_t total = 0;
  for (size_t d = 0; d < doc_terms_.size(); ++d) {
    total += doc_lengths_[d];
    for (const auto& [term, tf] : doc_terms_[d]) {
      ++df_[term];
      postings_[term].emplace_back(d, tf);
    }
  }
  avg_length_ = static_cast<double>(total) / static_cast<double>(doc_ids_.size());
}

bool Bm25Index::contains(std::string_view doc_id) const {
  return id_index_.contains(std::string(doc_id));
}

size_t Bm25Index::document_frequency(std::string_view term) const {
  auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

double Bm25Index::idf(std::string_view term) const {
  const double n = static_cast<double>(doc_ids_.size());
  const double df = static_cast<double>(document_frequency(term));
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

RankedList Bm25Index::retrieve(std::string_view query, size_t k) const {
  require_k(k);
  const auto terms = analyze(query);
  if (terms.empty()) throw Error(ErrorCode::kEmptyQuery, "query has no terms");
  std::vector<double> scores(doc_ids_.size(), 0.0);
  std::vector<bool> hit(doc_ids_.size(), false);
  for (const auto& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double w = idf(term);
    for (const auto& [d, tf] : it->second) {
      const double norm = params_.k1 * (1.0 - params_.b +
                                        params_.b * static_cast<double>(doc_lengths_[d]) /
                                            avg_length_);
      scores[d] += w * (tf * (params_.k1 + 1.0)) / (tf + norm);
      hit[d] = true;
    }
  }
  std::vector<RankedEntry> scored;
  for (size_t d = 0; d < scores.size(); ++d) {
    if (hit[d]) scored.push_back({doc_ids_[d], scores[d]});
  }
  return top_k(std::move(scored), k);
}

void Bm25Index::save(const std::filesystem::path& path, std::string_view hash) const {
  json header = make_header(RetrieverKind::kBm25, hash);
  header["k1"] = params_.k1;
  header["b"] = params_.b;
  std::string out = header.dump() + "\n";
  for (size_t d = 0; d < doc_ids_.size(); ++d) {
    json terms = json::object();
    for (const auto& [term, tf] : doc_terms_[d]) terms[term] = tf;
    out += json{{"id", doc_ids_[d]}, {"length", doc_lengths_[d]}, {"terms", terms}}.dump();
    out += '\n';
  }
  write_file(path, out);
}

Bm25Index Bm25Index::load(const std::filesystem::path& path, std::string_view expected_hash) {
  const auto records = read_jsonl(path);
  const json header = check_header(records, path, RetrieverKind::kBm25, expected_hash);
  Bm25Index index;
  index.params_ = {header.at("k1").get<double>(), header.at("b").get<double>()};
  for (size_t i = 1; i < records.size(); ++i) {
    const json& r = records[i];
    index.doc_ids_.push_back(r.at("id").get<std::string>());
    index.doc_lengths_.push_back(r.at("length").get<size_t>());
    std::map<std::string, uint32_t> tf;
    for (const auto& [term, count] : r.at("terms").items()) tf[term] = count.get<uint32_t>();
    index.doc_terms_.push_back(std::move(tf));
  }
  if (index.doc_ids_.empty()) throw Error(ErrorCode::kEmptyCorpus, path.string() + " has no documents");
  index.finalize();
  return index;
}

bool operator==(const Bm25Index& a, const Bm25Index& b) {
  return a.params_.k1 == b.params_.k1 && a.params_.b == b.params_.b &&
         a.doc_ids_ == b.doc_ids_ && a.doc_lengths_ == b.doc_lengths_ &&
         a.doc_terms_ == b.doc_terms_;
}

// ---- dense ----

DenseIndex DenseIndex::build(std::span<const CorpusDoc> docs,
                             std::shared_ptr<EmbeddingProvider> provider, size_t token_budget) {
  if (docs.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot index an empty corpus");
  if (!provider) throw Error(ErrorCode::kInvalidArgument, "dense index needs a provider");
  DenseIndex index;
  index.provider_ = std::move(provider);
  index.token_budget_ = token_budget;
  std::vector<std::string> texts;
  for (const auto& doc : docs) {
    index.doc_ids_.push_back(doc.id);
    texts.push_back(truncate_tokens(doc.text, token_budget));
  }
  index.id_index_ = index_ids(index.doc_ids_);
  index.vectors_ = index.provider_->embed(texts);
  return index;
}

bool DenseIndex::contains(std::string_view doc_id) const {
  return id_index_.contains(std::string(doc_id));
}

RankedList DenseIndex::retrieve(std::string_view query, size_t k) const {
  require_k(k);
  if (tokenize(query).empty()) throw Error(ErrorCode::kEmptyQuery, "query has no terms");
  const auto q = provider_->embed_one(std::string(query));
  std::vector<RankedEntry> scored;
  scored.reserve(vectors_.size());
  for (size_t d = 0; d < vectors_.size(); ++d) {
    scored.push_back({doc_ids_[d], cos_sim(q, vectors_[d])});
  }
  return top_k(std::move(scored), k);
}

void DenseIndex::save(const std::filesystem::path& path, std::string_view hash) const {
  json header = make_header(RetrieverKind::kDense, hash);
  header["provider"] = provider_->identity();
  header["token_budget"] = token_budget_;
  std::string out = header.dump() + "\n";
  for (size_t d = 0; d < doc_ids_.size(); ++d) {
    const auto c = vectors_[d].components();
    out += json{{"id", doc_ids_[d]}, {"vector", std::vector<double>(c.begin(), c.end())}}.dump();
    out += '\n';
  }
  write_file(path, out);
}

DenseIndex DenseIndex::load(const std::filesystem::path& path, std::string_view expected_hash,
                            std::shared_ptr<EmbeddingProvider> provider) {
  const auto records = read_jsonl(path);
  const json header = check_header(records, path, RetrieverKind::kDense, expected_hash);
  if (!provider) throw Error(ErrorCode::kInvalidArgument, "dense index needs a provider");
  if (header.value("provider", "") != provider->identity()) {
    throw Error(ErrorCode::kConfig, path.string() + ": built with provider " +
                                        header.value("provider", "?"));
  }
  DenseIndex index;
  index.provider_ = std::move(provider);
  index.token_budget_ = header.at("token_budget").get<size_t>();
  for (size_t i = 1; i < records.size(); ++i) {
    index.doc_ids_.push_back(records[i].at("id").get<std::string>());
    index.vectors_.emplace_back(records[i].at("vector").get<std::vector<double>>());
  }
  if (index.doc_ids_.empty()) throw Error(ErrorCode::kEmptyCorpus, path.string() + " has no documents");
  index.id_index_ = index_ids(index.doc_ids_);
  return index;
}

// ---- rerank ----

RerankRetriever::RerankRetriever(std::shared_ptr<const DenseIndex> dense,
                                 std::shared_ptr<Reranker> reranker,
                                 std::span<const CorpusDoc> docs, size_t token_budget,
                                 size_t depth)
    : dense_(std::move(dense)), reranker_(std::move(reranker)), depth_(depth) {
  if (!dense_ || !reranker_) {
    throw Error(ErrorCode::kInvalidArgument, "rerank retriever needs a dense index and a reranker");
  }
  for (const auto& d : docs) texts_.emplace(d.id, truncate_tokens(d.text, token_budget));
}

bool RerankRetriever::contains(std::string_view doc_id) const { return dense_->contains(doc_id); }

RankedList RerankRetriever::retrieve(std::string_view query, size_t k) const {
  require_k(k);
  const RankedList first_stage = dense_->retrieve(query, std::max(depth_, k));
  std::vector<RerankCandidate> candidates;
  for (const auto& e : first_stage.entries) {
    auto it = texts_.find(e.doc_id);
    if (it == texts_.end()) {
      throw Error(ErrorCode::kMissingDoc, "no text for document '" + e.doc_id + "'");
    }
    candidates.push_back({e.doc_id, it->second});
  }
  auto rescored = reranker_->rerank(query, candidates);
  std::unordered_set<std::string> expected;
  for (const auto& c : candidates) expected.insert(c.id);
  if (rescored.size() != candidates.size()) {
    throw Error(ErrorCode::kProviderProtocol, reranker_->identity() + " dropped candidates");
  }
  for (const auto& e : rescored) {
    if (expected.erase(e.doc_id) != 1) {
      throw Error(ErrorCode::kProviderProtocol,
                  reranker_->identity() + " returned unexpected id '" + e.doc_id + "'");
    }
  }
  return top_k(std::move(rescored), k);
}

}  // namespace kpeval
