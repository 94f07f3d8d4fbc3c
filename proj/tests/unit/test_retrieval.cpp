#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "kpeval/dataset.hpp"
#include "kpeval/retrieval.hpp"
#include "test_support.hpp"

namespace kpeval {
namespace {

const std::vector<CorpusDoc> kToy = {
    {"d1", "The cat sat on the mat"},
    {"d2", "The dog sat"},
    {"d3", "Cats and dogs play"},
};

// Okapi BM25 written out for one term with hand-supplied statistics.
double okapi_term(double n, double df, double tf, double len, double avgdl) {
  const double k1 = 1.2, b = 0.75;
  const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
  return idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avgdl));
}

TEST(Bm25, Statistics) {
  const auto idx = Bm25Index::build(std::vector<CorpusDoc>{{"a", "a b"}, {"b", "a c"}});
  EXPECT_EQ(idx.doc_count(), 2u);
  EXPECT_EQ(idx.document_frequency("a"), 2u);
  EXPECT_EQ(idx.document_frequency("b"), 1u);
  EXPECT_EQ(idx.document_frequency("zzz"), 0u);
  EXPECT_DOUBLE_EQ(idx.average_length(), 2.0);
}

TEST(Bm25, ToyCorpusMatchesHandComputation) {
  const auto idx = Bm25Index::build(kToy);
  // Stems: d1 = the cat sat on the mat (6), d2 = the dog sat (3), d3 = cat and dog play (4).
  const double avgdl = 13.0 / 3.0;
  EXPECT_DOUBLE_EQ(idx.average_length(), avgdl);
  const RankedList r = idx.retrieve("cat sat", 10);
  ASSERT_EQ(r.entries.size(), 3u);
  std::map<std::string, double> got;
  for (const auto& e : r.entries) got[e.doc_id] = e.score;
  const double d1 = okapi_term(3, 2, 1, 6, avgdl) + okapi_term(3, 2, 1, 6, avgdl);
  const double d2 = okapi_term(3, 2, 1, 3, avgdl);
  const double d3 = okapi_term(3, 2, 1, 4, avgdl);
  EXPECT_NEAR(got["d1"], d1, 1e-9);
  EXPECT_NEAR(got["d2"], d2, 1e-9);
  EXPECT_NEAR(got["d3"], d3, 1e-9);
  // "the" appears twice in d1.
  const RankedList the = idx.retrieve("the", 10);
  ASSERT_EQ(the.entries.size(), 2u);
  EXPECT_EQ(the.entries[0].doc_id, "d1");
  EXPECT_NEAR(the.entries[0].score, okapi_term(3, 2, 2, 6, avgdl), 1e-9);
  EXPECT_NEAR(the.entries[1].score, okapi_term(3, 2, 1, 3, avgdl), 1e-9);
}

TEST(Bm25, RepeatedQueryTermsCountPerOccurrence) {
  const auto idx = Bm25Index::build(kToy);
  const double once = idx.retrieve("play", 1).entries[0].score;
  EXPECT_NEAR(idx.retrieve("play play", 1).entries[0].score, 2 * once, 1e-12);
}

TEST(Bm25, UniqueTermRanksItsDocumentFirst) {
  const auto idx = Bm25Index::build(kToy);
  const RankedList r = idx.retrieve("mat", 5);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].doc_id, "d1");
  EXPECT_EQ(r.rank_of("d1"), 1u);
  EXPECT_FALSE(r.rank_of("d2"));
}

TEST(Bm25, Errors) {
  const auto idx = Bm25Index::build(kToy);
  EXPECT_KPEVAL_ERROR(idx.retrieve(" ; ", 5), ErrorCode::kEmptyQuery);
  EXPECT_KPEVAL_ERROR(idx.retrieve("cat", 0), ErrorCode::kInvalidArgument);
  EXPECT_KPEVAL_ERROR(Bm25Index::build({}), ErrorCode::kEmptyCorpus);
  EXPECT_KPEVAL_ERROR(Bm25Index::build(std::vector<CorpusDoc>{{"a", "x"}, {"a", "y"}}),
                      ErrorCode::kDuplicateId);
}

TEST(Bm25, TiesBrokenByDocId) {
  const auto idx =
      Bm25Index::build(std::vector<CorpusDoc>{{"z", "same text"}, {"a", "same text"}, {"m", "other"}});
  const RankedList r = idx.retrieve("same", 5);
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.entries[0].doc_id, "a");
  EXPECT_EQ(r.entries[1].doc_id, "z");
}

TEST(Bm25, RandomCorporaMatchOracle) {
  std::mt19937_64 rng(77);
  const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "eps", "zeta"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CorpusDoc> docs;
    std::vector<std::map<std::string, int>> tfs;
    std::vector<int> lens;
    for (size_t d = test::uniform(rng, 1, 8); d > 0; --d) {
      std::string text;
      std::map<std::string, int> tf;
      const size_t len = test::uniform(rng, 1, 10);
      for (size_t t = 0; t < len; ++t) {
        const auto& w = vocab[test::uniform(rng, 0, vocab.size() - 1)];
        text += w + " ";
        ++tf[w];
      }
      docs.push_back({"doc" + std::to_string(docs.size()), text});
      tfs.push_back(tf);
      lens.push_back(static_cast<int>(len));
    }
    double avgdl = 0;
    for (int l : lens) avgdl += l;
    avgdl /= static_cast<double>(lens.size());
    std::vector<std::string> query;
    for (size_t q = test::uniform(rng, 1, 3); q > 0; --q) {
      query.push_back(vocab[test::uniform(rng, 0, vocab.size() - 1)]);
    }
    std::string qtext;
    for (const auto& q : query) qtext += q + " ";
    const auto idx = Bm25Index::build(docs);
    const RankedList r = idx.retrieve(qtext, docs.size());
    std::map<std::string, double> expected;
    for (size_t d = 0; d < docs.size(); ++d) {
      double s = 0;
      bool hit = false;
      for (const auto& q : query) {
        int df = 0;
        for (const auto& tf : tfs) df += tf.contains(q) ? 1 : 0;
        if (tfs[d].contains(q)) {
          hit = true;
          s += okapi_term(static_cast<double>(docs.size()), df, tfs[d].at(q), lens[d], avgdl);
        }
      }
      if (hit) expected[docs[d].id] = s;
    }
    ASSERT_EQ(r.entries.size(), expected.size());
    for (const auto& e : r.entries) EXPECT_NEAR(e.score, expected.at(e.doc_id), 1e-9);
    for (size_t i = 1; i < r.entries.size(); ++i) {
      EXPECT_GE(r.entries[i - 1].score, r.entries[i].score);
    }
  }
}

TEST(Bm25, PersistenceRoundTripAndStaleness) {
  test::TempDir dir;
  const auto idx = Bm25Index::build(kToy);
  const std::string hash = corpus_hash(kToy);
  idx.save(dir / "bm25.jsonl", hash);
  const auto back = Bm25Index::load(dir / "bm25.jsonl", hash);
  EXPECT_TRUE(back == idx);
  EXPECT_EQ(back.retrieve("cat sat", 3), idx.retrieve("cat sat", 3));
  EXPECT_TRUE(Bm25Index::build(kToy) == idx);

  auto changed = kToy;
  changed[1].text += " again";
  EXPECT_NE(corpus_hash(changed), hash);
  EXPECT_KPEVAL_ERROR(Bm25Index::load(dir / "bm25.jsonl", corpus_hash(changed)), ErrorCode::kConfig);
  write_file(dir / "junk.jsonl", "{\"format\":\"other\"}\n");
  EXPECT_KPEVAL_ERROR(Bm25Index::load(dir / "junk.jsonl", hash), ErrorCode::kConfig);
}

TEST(CorpusHash, FieldBoundariesMatter) {
  EXPECT_NE(corpus_hash(std::vector<CorpusDoc>{{"ab", "c"}}),
            corpus_hash(std::vector<CorpusDoc>{{"a", "bc"}}));
}

TEST(Dense, ExactCosineSearch) {
  auto p = test::table({{"doc one", {1, 0}}, {"doc two", {0.6, 0.8}}, {"doc three", {-1, 0}},
                        {"query", {0.6, 0.8}}});
  const std::vector<CorpusDoc> docs = {{"a", "doc one"}, {"b", "doc two"}, {"c", "doc three"}};
  const auto idx = DenseIndex::build(docs, p);
  const RankedList r = idx.retrieve("query", 3);
  ASSERT_EQ(r.entries.size(), 3u);
  EXPECT_EQ(r.entries[0].doc_id, "b");
  EXPECT_NEAR(r.entries[0].score, 1.0, 1e-12);
  EXPECT_EQ(r.entries[1].doc_id, "a");
  EXPECT_NEAR(r.entries[1].score, 0.6, 1e-12);
  EXPECT_EQ(r.entries[2].doc_id, "c");
  EXPECT_EQ(idx.retrieve("query", 1).entries.size(), 1u);
}

TEST(Dense, TruncatesDocumentsBeforeEmbedding) {
  auto p = test::table({{"w1 w2", {1, 0}}, {"q", {1, 0}}});
  const std::vector<CorpusDoc> docs = {{"a", "w1 w2 w3 w4"}};
  const auto idx = DenseIndex::build(docs, p, 2);
  EXPECT_EQ(idx.retrieve("q", 1).entries[0].doc_id, "a");
  EXPECT_KPEVAL_ERROR(DenseIndex::build(docs, p, 3), ErrorCode::kMissingEmbedding);
}

TEST(Dense, PersistenceChecksProvider) {
  test::TempDir dir;
  auto p = test::table({{"x", {1, 0}}, {"y", {0, 1}}, {"q", {1, 1}}});
  const std::vector<CorpusDoc> docs = {{"a", "x"}, {"b", "y"}};
  const auto idx = DenseIndex::build(docs, p);
  idx.save(dir / "dense.jsonl", corpus_hash(docs));
  const auto back = DenseIndex::load(dir / "dense.jsonl", corpus_hash(docs), p);
  EXPECT_EQ(back.vectors(), idx.vectors());
  EXPECT_EQ(back.retrieve("q", 2), idx.retrieve("q", 2));
  auto other = std::make_shared<TableEmbeddingProvider>(
      std::map<std::string, EmbeddingVector>{{"x", EmbeddingVector({1.0})}}, "elsewhere");
  EXPECT_KPEVAL_ERROR(DenseIndex::load(dir / "dense.jsonl", corpus_hash(docs), other),
                      ErrorCode::kConfig);
}

class ReverseReranker final : public Reranker {
 public:
  std::vector<RankedEntry> rerank(std::string_view,
                                  std::span<const RerankCandidate> candidates) override {
    std::vector<RankedEntry> out;
    for (size_t i = 0; i < candidates.size(); ++i) {
      out.push_back({candidates[i].id, static_cast<double>(i)});
    }
    return out;
  }
  std::string identity() const override { return "reverse"; }
};

class DroppingReranker final : public Reranker {
 public:
  std::vector<RankedEntry> rerank(std::string_view, std::span<const RerankCandidate> c) override {
    return {{c[0].id, 1.0}};
  }
  std::string identity() const override { return "dropping"; }
};

TEST(Rerank, ReordersDenseCandidates) {
  auto p = test::table({{"x", {1, 0}}, {"y", {0.7, 0.7}}, {"z", {0, 1}}, {"q", {1, 0.1}}});
  const std::vector<CorpusDoc> docs = {{"a", "x"}, {"b", "y"}, {"c", "z"}};
  auto dense = std::make_shared<const DenseIndex>(DenseIndex::build(docs, p));
  EXPECT_EQ(dense->retrieve("q", 3).entries[0].doc_id, "a");
  RerankRetriever rr(dense, std::make_shared<ReverseReranker>(), docs, 512, 2);
  const RankedList r = rr.retrieve("q", 2);
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.entries[0].doc_id, "b");
  EXPECT_EQ(r.entries[1].doc_id, "a");
  RerankRetriever bad(dense, std::make_shared<DroppingReranker>(), docs);
  EXPECT_KPEVAL_ERROR(bad.retrieve("q", 2), ErrorCode::kProviderProtocol);
}

}  // namespace
}  // namespace kpeval
