#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "expect_error.hpp"
#include "kpeval/quality.hpp"
#include "test_support.hpp"

namespace kpeval {
namespace {

TEST(Prompts, NaturalnessTemplate) {
  EXPECT_EQ(build_naturalness_prompt(Phrase::from_text("word recognition")).text,
            "question: Is this a natural utterance? </s> utterance: This is an article about "
            "word recognition.");
  EXPECT_EQ(build_naturalness_prompt(Phrase::from_text("U.S.")).text,
            "question: Is this a natural utterance? </s> utterance: This is an article about "
            "U.S..");
}

TEST(Prompts, FaithfulnessTemplate) {
  const QualityPrompt p = build_faithfulness_prompt(Phrase::from_text("bm25"), "Doc text.");
  EXPECT_EQ(p.text,
            "question: Is this claim consistent with the document? </s> summary: the concept "
            "bm25 is mentioned or described in the document. </s> document: Doc text.");
  EXPECT_TRUE(p.warnings.empty());
  EXPECT_EQ(p.dimension, QualityDimension::kFaithfulness);
}

TEST(Prompts, EmptyDocumentStillWellFormed) {
  const QualityPrompt p = build_faithfulness_prompt(Phrase::from_text("x"), "");
  EXPECT_TRUE(p.text.ends_with("</s> document: "));
  EXPECT_EQ(p.warnings, std::vector<std::string>{"empty_document"});
  EXPECT_FALSE(build_faithfulness_prompt(Phrase::from_text("x"), " ").warnings.empty());
}

TEST(Prompts, MatchGoldenFile) {
  std::ifstream in(test::source_path("tests/golden/prompts.jsonl"));
  ASSERT_TRUE(in);
  std::string line;
  size_t n = 0;
  while (std::getline(in, line)) {
    const auto rec = nlohmann::json::parse(line);
    EvalInstance inst;
    inst.id = "g";
    inst.title = rec["title"];
    inst.body = rec["body"];
    const Phrase phrase = Phrase::from_text(rec["phrase"].get<std::string>());
    const size_t budget = rec["budget"];
    EXPECT_EQ(build_naturalness_prompt(phrase).text, rec["naturalness"].get<std::string>());
    EXPECT_EQ(build_faithfulness_prompt(phrase, faithfulness_document(inst, budget)).text,
              rec["faithfulness"].get<std::string>());
    ++n;
  }
  EXPECT_EQ(n, 20u);
}

TEST(Prompts, InjectiveInPhrase) {
  const auto a = build_naturalness_prompt(Phrase::from_text("neural net"));
  const auto b = build_naturalness_prompt(Phrase::from_text("Neural net"));
  EXPECT_NE(a.text, b.text);
}

TEST(FaithfulnessDocument, TruncatesToBudget) {
  EvalInstance inst;
  inst.title = "Title words";
  std::string body;
  for (int i = 0; i < 600; ++i) body += "w" + std::to_string(i) + " ";
  inst.body = body;
  const std::string doc = faithfulness_document(inst, 512);
  EXPECT_EQ(tokenize(doc).size(), 512u);
  EXPECT_TRUE(doc.starts_with("Title words w0 w1"));
  EXPECT_TRUE(doc.ends_with(" w509"));
}

TEST(BooleanQa, Examples) {
  EXPECT_EQ(boolean_qa_score(0.5, 0.5), 0.5);
  EXPECT_EQ(boolean_qa_score(0.3, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(boolean_qa_score(0.2, 0.6), 0.25);
  EXPECT_KPEVAL_ERROR(boolean_qa_score(0, 0), ErrorCode::kDegenerateMass);
  EXPECT_KPEVAL_ERROR(boolean_qa_score(-0.1, 0.5), ErrorCode::kInvalidArgument);
}

TEST(BooleanQa, ComplementProperty) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(rng), q = u(rng) + 1e-9;
    EXPECT_NEAR(boolean_qa_score(p, q) + boolean_qa_score(q, p), 1.0, 1e-15);
  }
}

// Returns scripted answers in order.
class ListProvider final : public ScoreProvider {
 public:
  explicit ListProvider(std::vector<YesNo> answers) : answers_(std::move(answers)) {}
  std::vector<YesNo> score(std::span<const QualityPrompt> prompts) override {
    seen = std::vector<QualityPrompt>(prompts.begin(), prompts.end());
    return answers_;
  }
  std::string identity() const override { return "list"; }
  std::vector<QualityPrompt> seen;

 private:
  std::vector<YesNo> answers_;
};

class FailingProvider final : public ScoreProvider {
 public:
  std::vector<YesNo> score(std::span<const QualityPrompt>) override {
    throw Error(ErrorCode::kProviderUnavailable, "down");
  }
  std::string identity() const override { return "failing"; }
};

EvalInstance doc_with(std::vector<std::string> preds) {
  EvalInstance inst;
  inst.id = "d";
  inst.title = "T";
  inst.body = "B";
  inst.predictions = test::phrases(preds);
  return inst;
}

TEST(ScoreDimension, MeanOfNormalizedScores) {
  StubScoreProvider yes(YesNo{1, 0});
  EXPECT_EQ(score_dimension(doc_with({"a", "b"}), QualityDimension::kNaturalness, yes), 1.0);
  ListProvider list({{0.5, 0.5}, {0.2, 0.6}});
  EXPECT_DOUBLE_EQ(score_dimension(doc_with({"a", "b"}), QualityDimension::kFaithfulness, list),
                   0.375);
  ASSERT_EQ(list.seen.size(), 2u);
  EXPECT_TRUE(list.seen[0].text.ends_with("document: T B"));
}

TEST(ScoreDimension, Errors) {
  StubScoreProvider stub;
  EXPECT_KPEVAL_ERROR(score_dimension(doc_with({}), QualityDimension::kNaturalness, stub),
                      ErrorCode::kEmptyPredictions);
  FailingProvider down;
  try {
    score_dimension(doc_with({"a", "b", "c"}), QualityDimension::kNaturalness, down);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProviderUnavailable);
    EXPECT_NE(std::string(e.what()).find("3 naturalness prompts"), std::string::npos) << e.what();
  }
  ListProvider short_answer({{1, 0}});
  EXPECT_KPEVAL_ERROR(
      score_dimension(doc_with({"a", "b"}), QualityDimension::kNaturalness, short_answer),
      ErrorCode::kProviderProtocol);
}

TEST(ScoreDimension, PermutationInvariantWithStub) {
  StubScoreProvider stub;
  const double a = score_dimension(doc_with({"x", "y", "z"}), QualityDimension::kNaturalness, stub);
  const double b = score_dimension(doc_with({"z", "x", "y"}), QualityDimension::kNaturalness, stub);
  EXPECT_NEAR(a, b, 1e-15);
}

TEST(StubProvider, DeterministicAndValid) {
  StubScoreProvider stub;
  std::vector<QualityPrompt> prompts = {build_naturalness_prompt(Phrase::from_text("a")),
                                        build_naturalness_prompt(Phrase::from_text("b")),
                                        build_naturalness_prompt(Phrase::from_text("a"))};
  const auto r1 = stub.score(prompts);
  const auto r2 = stub.score(prompts);
  ASSERT_EQ(r1.size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r1[i].p_yes, r2[i].p_yes);
    EXPECT_GT(r1[i].p_yes, 0.0);
    EXPECT_GT(r1[i].p_no, 0.0);
  }
  EXPECT_EQ(r1[0].p_yes, r1[2].p_yes);
}

}  // namespace
}  // namespace kpeval
