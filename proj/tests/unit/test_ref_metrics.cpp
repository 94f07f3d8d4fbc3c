#include <random>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "kpeval/ref_metrics.hpp"
#include "test_support.hpp"

namespace kpeval {
namespace {

const char* kWorkedRefs =
    "online ; cursive ; word recognition ; offline ; handwriting ; classifier combination";
const char* kWorkedPreds =
    "online cursive word recognition ; pseudo online information ; stroke order independent ; "
    "classification decisions ; single engine ; offline representation";

TEST(MakePrf, HarmonicMean) {
  const PRF f = make_prf(0.33, 0.65);
  EXPECT_NEAR(f.f1, 0.44, 0.005);
  EXPECT_EQ(make_prf(0, 0).f1, 0.0);
  EXPECT_EQ(make_prf(1, 0).f1, 0.0);
}

TEST(ExactMatch, WorkedExample) {
  const PRF f = exact_match_prf(parse_phrase_list(kWorkedPreds), parse_phrase_list(kWorkedRefs));
  EXPECT_EQ(f.precision, 0.0);
  EXPECT_EQ(f.recall, 0.0);
  EXPECT_EQ(f.f1, 0.0);
}

TEST(ExactMatch, StemmedEquality) {
  const PRF f = exact_match_prf(test::phrases({"word recognitions"}),
                                test::phrases({"Word Recognition"}));
  EXPECT_EQ(f.precision, 1.0);
  EXPECT_EQ(f.recall, 1.0);
  EXPECT_EQ(f.f1, 1.0);
}

TEST(ExactMatch, IdentityAndEmptyCases) {
  const auto y = test::phrases({"a b", "c"});
  const PRF f = exact_match_prf(y, y);
  EXPECT_EQ(f.f1, 1.0);
  EXPECT_KPEVAL_ERROR(exact_match_prf(y, {}), ErrorCode::kEmptyReferences);
  const PRF empty = exact_match_prf({}, y);
  EXPECT_EQ(empty.precision, 0.0);
  EXPECT_EQ(empty.recall, 0.0);
}

TEST(SubstringMatch, WorkedExample) {
  const PRF f =
      substring_match_prf(parse_phrase_list(kWorkedPreds), parse_phrase_list(kWorkedRefs));
  EXPECT_NEAR(f.precision, 0.50, 0.01);
  EXPECT_NEAR(f.recall, 0.67, 0.01);
  EXPECT_NEAR(f.f1, 0.57, 0.01);
}

TEST(SubstringMatch, TokenAligned) {
  EXPECT_TRUE(substring_match(Phrase::from_text("cursive word"),
                              Phrase::from_text("online cursive word recognition")));
  EXPECT_FALSE(substring_match(Phrase::from_text("art"), Phrase::from_text("party")));
  // "classif" is a character prefix of "classifi" but not a token.
  EXPECT_FALSE(substring_match(Phrase::from_text("classification decisions"),
                               Phrase::from_text("classifier combination")));
  const PRF f = substring_match_prf(test::phrases({"cursive word"}),
                                    test::phrases({"online cursive word recognition"}));
  EXPECT_EQ(f.precision, 1.0);
  const PRF none = substring_match_prf(test::phrases({"x y"}), test::phrases({"z"}));
  EXPECT_EQ(none.f1, 0.0);
}

TEST(LexicalMatch, ExactNeverExceedsSubstring) {
  std::mt19937_64 rng(17);
  const std::vector<std::string> words = {"net", "nets", "deep", "model", "graph", "learning"};
  auto random_set = [&](size_t lo) {
    std::vector<std::string> out;
    for (size_t n = test::uniform(rng, lo, 5); n > 0; --n) {
      std::string s;
      for (size_t t = test::uniform(rng, 1, 3); t > 0; --t) {
        s += words[test::uniform(rng, 0, words.size() - 1)] + " ";
      }
      out.push_back(s);
    }
    return test::phrases(out);
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = random_set(0);
    const auto y = random_set(1);
    const PRF e = exact_match_prf(p, y);
    const PRF s = substring_match_prf(p, y);
    EXPECT_LE(e.precision, s.precision);
    EXPECT_LE(e.recall, s.recall);
    for (const PRF& f : {e, s}) {
      EXPECT_GE(f.precision, 0.0);
      EXPECT_LE(f.precision, 1.0);
      EXPECT_GE(f.recall, 0.0);
      EXPECT_LE(f.recall, 1.0);
      EXPECT_GE(f.f1, 0.0);
      EXPECT_LE(f.f1, 1.0);
    }
  }
}

TEST(RPrecision, Examples) {
  const auto y = test::phrases({"a", "b", "c"});
  EXPECT_EQ(r_precision(test::phrases({"c", "a", "b"}), y), 1.0);
  EXPECT_EQ(r_precision(test::phrases({"a", "z", "b"}), test::phrases({"a", "b"})), 0.5);
  // Fewer predictions than references: matches still divide by |Y|.
  EXPECT_DOUBLE_EQ(r_precision(test::phrases({"a", "b"}), y), 2.0 / 3.0);
  // Only the top |Y| predictions count.
  EXPECT_EQ(r_precision(test::phrases({"x", "y", "z", "a"}), y), 0.0);
  EXPECT_KPEVAL_ERROR(r_precision(y, {}), ErrorCode::kEmptyReferences);
}

TEST(RougeL, Examples) {
  const PRF same = rouge_l_prf(test::phrases({"a b", "c"}), test::phrases({"a", "b c"}));
  EXPECT_EQ(same.f1, 1.0);
  const PRF f = rouge_l_prf(test::phrases({"a b c"}), test::phrases({"a c"}));
  EXPECT_DOUBLE_EQ(f.precision, 2.0 / 3.0);
  EXPECT_EQ(f.recall, 1.0);
  const PRF none = rouge_l_prf(test::phrases({"x"}), test::phrases({"y z"}));
  EXPECT_EQ(none.f1, 0.0);
}

TEST(Lcs, MatchesExhaustiveSubsequenceSearch) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> a(test::uniform(rng, 0, 8)), b(test::uniform(rng, 0, 8));
    for (auto& t : a) t = std::string(1, static_cast<char>('a' + test::uniform(rng, 0, 3)));
    for (auto& t : b) t = std::string(1, static_cast<char>('a' + test::uniform(rng, 0, 3)));
    size_t best = 0;
    for (uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
      std::vector<std::string> sub;
      for (size_t i = 0; i < a.size(); ++i) {
        if (mask & (1u << i)) sub.push_back(a[i]);
      }
      size_t j = 0;
      for (const auto& t : b) {
        if (j < sub.size() && sub[j] == t) ++j;
      }
      if (j == sub.size()) best = std::max(best, sub.size());
    }
    EXPECT_EQ(lcs_length(a, b), best);
  }
}

TEST(SemPrf, IdenticalSetsScoreOne) {
  auto p = test::table({{"a", {1, 2, 3}}, {"b", {-1, 0, 2}}});
  const auto y = test::phrases({"a", "b"});
  const PRF f = sem_prf(y, y, *p);
  EXPECT_NEAR(f.precision, 1.0, 1e-9);
  EXPECT_NEAR(f.recall, 1.0, 1e-9);
  EXPECT_NEAR(f.f1, 1.0, 1e-9);
}

TEST(SemPrf, TwoDimensionalExample) {
  auto p = test::table({{"x", {1, 0}}, {"y", {0, 1}}});
  const PRF f = sem_prf(test::phrases({"x"}), test::phrases({"x", "y"}), *p);
  EXPECT_DOUBLE_EQ(f.precision, 1.0);
  EXPECT_DOUBLE_EQ(f.recall, 0.5);
  EXPECT_DOUBLE_EQ(f.f1, 2.0 / 3.0);
}

TEST(SemPrf, WorkedScoresFromMockTable) {
  const std::vector<double> a = {0.58, 0.37, 0.25, 0.44, 0.08, 0.63};
  const std::vector<double> b = {0.39, 0.56, 0.58, 0.63, 0.38, 0.44};
  SimilarityMatrix m(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) m.at(i, j) = std::min(a[i], b[j]);
  }
  const PRF f = sem_prf_from_similarities(m);
  EXPECT_NEAR(f.precision, 0.39, 0.005);
  EXPECT_NEAR(f.recall, 0.50, 0.005);
  EXPECT_NEAR(f.f1, 0.44, 0.005);
}

TEST(SemPrf, ThresholdZeroesNegativeSimilarities) {
  auto p = test::table({{"x", {1, 0}}, {"y", {-1, 0.1}}});
  const PRF f = sem_prf(test::phrases({"x"}), test::phrases({"y"}), *p);
  EXPECT_EQ(f.precision, 0.0);
  EXPECT_EQ(f.recall, 0.0);
  const PRF strict = sem_prf(test::phrases({"x"}), test::phrases({"x"}), *p, 1.0);
  EXPECT_EQ(strict.precision, 0.0);
}

TEST(SemPrf, EmptyPredictionsAndReferences) {
  auto p = test::table({{"x", {1, 0}}});
  const PRF f = sem_prf({}, test::phrases({"x"}), *p);
  EXPECT_EQ(f.precision, 0.0);
  EXPECT_EQ(f.recall, 0.0);
  EXPECT_KPEVAL_ERROR(sem_prf(test::phrases({"x"}), {}, *p), ErrorCode::kEmptyReferences);
}

// Random file-backed instance: phrases named p0.. / y0.. with random vectors.
struct RandomInstance {
  std::shared_ptr<TableEmbeddingProvider> provider;
  std::vector<Phrase> p, y;
  std::map<std::string, std::vector<double>> vectors;
};

RandomInstance random_instance(std::mt19937_64& rng, size_t max_p, size_t max_y, size_t max_dim,
                               size_t min_p = 1) {
  RandomInstance inst;
  const size_t dim = test::uniform(rng, 1, max_dim);
  test::VectorTable rows;
  std::vector<std::string> p_names, y_names;
  for (size_t i = test::uniform(rng, min_p, max_p); i > 0; --i) {
    p_names.push_back("p" + std::to_string(p_names.size()));
  }
  for (size_t i = test::uniform(rng, 1, max_y); i > 0; --i) {
    y_names.push_back("y" + std::to_string(y_names.size()));
  }
  for (const auto& n : p_names) rows.push_back({n, test::random_vector(rng, dim)});
  for (const auto& n : y_names) rows.push_back({n, test::random_vector(rng, dim)});
  // Occasionally share a vector so exact ties and perfect matches occur.
  if (!p_names.empty() && test::uniform(rng, 0, 3) == 0) rows[0].second = rows.back().second;
  for (const auto& [k, v] : rows) inst.vectors[k] = v;
  inst.provider = test::table(rows);
  inst.p = test::phrases(p_names);
  inst.y = test::phrases(y_names);
  return inst;
}

double oracle_directional(const std::vector<Phrase>& from, const std::vector<Phrase>& to,
                          const std::map<std::string, std::vector<double>>& vecs, double alpha) {
  if (from.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& a : from) {
    double best = 0.0;
    for (const auto& b : to) {
      const double s = test::naive_cos(vecs.at(a.raw()), vecs.at(b.raw()));
      best = std::max(best, s > alpha ? s : 0.0);
    }
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

TEST(SemPrf, MatchesBruteForceOracle) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 2000; ++trial) {
    auto inst = random_instance(rng, 4, 4, 8, 0);
    const double alpha = trial % 3 == 0 ? 0.2 : 0.0;
    const PRF f = sem_prf(inst.p, inst.y, *inst.provider, alpha);
    EXPECT_NEAR(f.precision, oracle_directional(inst.p, inst.y, inst.vectors, alpha), 1e-12);
    EXPECT_NEAR(f.recall, oracle_directional(inst.y, inst.p, inst.vectors, alpha), 1e-12);
  }
}

TEST(SemPrf, Duality) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 1000; ++trial) {
    auto inst = random_instance(rng, 8, 8, 16);
    EXPECT_EQ(sem_prf(inst.p, inst.y, *inst.provider).precision,
              sem_prf(inst.y, inst.p, *inst.provider).recall);
  }
}

TEST(SemPrf, PermutationInvariantAndMonotone) {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 500; ++trial) {
    auto inst = random_instance(rng, 6, 6, 8);
    const PRF base = sem_prf(inst.p, inst.y, *inst.provider);
    auto p2 = inst.p;
    auto y2 = inst.y;
    std::shuffle(p2.begin(), p2.end(), rng);
    std::shuffle(y2.begin(), y2.end(), rng);
    const PRF perm = sem_prf(p2, y2, *inst.provider);
    EXPECT_NEAR(perm.precision, base.precision, 1e-12);
    EXPECT_NEAR(perm.recall, base.recall, 1e-12);
    EXPECT_NEAR(sem_cov(p2, y2, *inst.provider), sem_cov(inst.p, inst.y, *inst.provider), 1e-12);
    // Appending a reference never lowers precision.
    auto y3 = inst.y;
    y3.push_back(inst.p.front());
    EXPECT_GE(sem_prf(inst.p, y3, *inst.provider).precision, base.precision);
    for (double v : {base.precision, base.recall, base.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(SemCov, Examples) {
  auto p = test::table({{"x", {1, 0}}, {"y", {0, 1}}});
  EXPECT_NEAR(sem_cov(test::phrases({"x", "y"}), test::phrases({"x", "y"}), *p), 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(sem_cov(test::phrases({"x"}), test::phrases({"y"}), *p), 0.0);
  EXPECT_NEAR(sem_cov(test::phrases({"x", "y"}), test::phrases({"x"}), *p), 0.70710678, 1e-8);
  EXPECT_KPEVAL_ERROR(sem_cov({}, test::phrases({"x"}), *p), ErrorCode::kEmptySet);
}

TEST(SemCov, MatchesBruteForceOracle) {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 1000; ++trial) {
    auto inst = random_instance(rng, 4, 4, 8);
    auto pool = [&](const std::vector<Phrase>& set) {
      std::vector<double> u = inst.vectors.at(set[0].raw());
      for (const auto& ph : set) {
        const auto& v = inst.vectors.at(ph.raw());
        for (size_t d = 0; d < u.size(); ++d) u[d] = std::max(u[d], v[d]);
      }
      return u;
    };
    EXPECT_NEAR(sem_cov(inst.p, inst.y, *inst.provider),
                test::naive_cos(pool(inst.p), pool(inst.y)), 1e-12);
  }
}

TEST(MatchPhraseToSet, ExactAndSubstring) {
  const auto set = test::phrases({"deep model", "neural networks", "neural network"});
  const auto d = match_phrase_to_set(Phrase::from_text("Neural Network"), set,
                                     MatchStrategy::kExact);
  EXPECT_EQ(d.score, 1.0);
  ASSERT_TRUE(d.best_index);
  EXPECT_EQ(*d.best_index, 1u);  // earliest stem-equal candidate
  const auto none = match_phrase_to_set(Phrase::from_text("graph"), set, MatchStrategy::kSubstring);
  EXPECT_EQ(none.score, 0.0);
  EXPECT_FALSE(none.best_match);
  const auto sub = match_phrase_to_set(Phrase::from_text("model"), set, MatchStrategy::kSubstring);
  EXPECT_EQ(sub.best_index, 0u);
  EXPECT_KPEVAL_ERROR(match_phrase_to_set(set[0], {}, MatchStrategy::kExact), ErrorCode::kEmptySet);
}

TEST(MatchPhraseToSet, Semantic) {
  auto p = test::table({{"p", {1, 0}}, {"q", {0.9, 0.1}}, {"r", {-1, -0.2}}});
  const auto d = match_phrase_to_set(Phrase::from_text("p"), test::phrases({"q", "p"}),
                                     MatchStrategy::kSemantic, p.get());
  EXPECT_EQ(d.best_index, 1u);
  EXPECT_DOUBLE_EQ(d.score, 1.0);
  const auto none = match_phrase_to_set(Phrase::from_text("p"), test::phrases({"r"}),
                                        MatchStrategy::kSemantic, p.get());
  EXPECT_FALSE(none.best_match);
  EXPECT_EQ(none.score, 0.0);
  const auto tie = match_phrase_to_set(Phrase::from_text("p"), test::phrases({"q", "q"}),
                                       MatchStrategy::kSemantic, p.get());
  EXPECT_EQ(tie.best_index, 0u);
}

}  // namespace
}  // namespace kpeval
