#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpeval/dataset.hpp"
#include "kpeval/phrase.hpp"

namespace kpeval {

enum class QualityDimension { kNaturalness, kFaithfulness };

std::string_view to_string(QualityDimension d);

struct QualityPrompt {
  QualityDimension dimension = QualityDimension::kNaturalness;
  std::string text;
  // e.g. "empty_document"
  std::vector<std::string> warnings;
};

// question: Is this a natural utterance? </s> utterance: This is an article about {raw}.
QualityPrompt build_naturalness_prompt(const Phrase& phrase);

// question: Is this claim consistent with the document? </s> summary: the concept {raw}
// is mentioned or described in the document. </s> document: {doc_text}
// `doc_text` is substituted as given; callers truncate it first.
QualityPrompt build_faithfulness_prompt(const Phrase& phrase, std::string_view doc_text);

// title + " " + body, cut to `token_budget` whitespace tokens.
std::string faithfulness_document(const EvalInstance& instance, size_t token_budget = 512);

struct YesNo {
  double p_yes = 0.0;
  double p_no = 0.0;
};

// p_yes / (p_yes + p_no). Throws Error(kDegenerateMass) when both are zero and
// kInvalidArgument for negative or non-finite input.
double boolean_qa_score(double p_yes, double p_no);

// Answers boolean-QA prompts with (P(Yes), P(No)) pairs, one per prompt in
// request order.
class ScoreProvider {
 public:
  virtual ~ScoreProvider() = default;
  virtual std::vector<YesNo> score(std::span<const QualityPrompt> prompts) = 0;
  virtual std::string identity() const = 0;
};

// Deterministic stand-in: probabilities derived from a hash of the prompt
// text, or a fixed pair for every prompt.
class StubScoreProvider final : public ScoreProvider {
 public:
  StubScoreProvider() = default;
  explicit StubScoreProvider(YesNo constant) : constant_(constant) {}

  std::vector<YesNo> score(std::span<const QualityPrompt> prompts) override;
  std::string identity() const override { return "stub"; }

 private:
  std::optional<YesNo> constant_;
};

// Mean boolean-QA score over the instance's predictions. Throws
// Error(kEmptyPredictions) for an empty prediction list.
double score_dimension(const EvalInstance& instance, QualityDimension dimension,
                       ScoreProvider& provider, size_t token_budget = 512);

}  // namespace kpeval
