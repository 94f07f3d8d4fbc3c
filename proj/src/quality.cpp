#include "kpeval/quality.hpp"

#include <cmath>

#include "kpeval/error.hpp"
#include "kpeval/hashing.hpp"

namespace kpeval {

std::string_view to_string(QualityDimension d) {
  return d == QualityDimension::kNaturalness ? "naturalness" : "faithfulness";
}

QualityPrompt build_naturalness_prompt(const Phrase& phrase) {
  QualityPrompt p;
  p.dimension = QualityDimension::kNaturalness;
  p.text = "question: Is this a natural utterance? </s> utterance: This is an article about " +
           phrase.raw() + ".";
  return p;
}

QualityPrompt build_faithfulness_prompt(const Phrase& phrase, std::string_view doc_text) {
  QualityPrompt p;
  p.dimension = QualityDimension::kFaithfulness;
  p.text = "question: Is this claim consistent with the document? </s> summary: the concept " +
           phrase.raw() + " is mentioned or described in the document. </s> document: " +
           std::string(doc_text);
  if (doc_text.find_first_not_of(" \t\n\v\f\r") == std::string_view::npos) {
    p.warnings.emplace_back("empty_document");
  }
  return p;
}

std::string faithfulness_document(const EvalInstance& instance, size_t token_budget) {
  return truncate_tokens(instance.text(), token_budget);
}

double boolean_qa_score(double p_yes, double p_no) {
  if (!std::isfinite(p_yes) || !std::isfinite(p_no) || p_yes < 0.0 || p_no < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "probabilities must be finite and non-negative");
  }
  const double mass = p_yes + p_no;
  if (mass == 0.0) throw Error(ErrorCode::kDegenerateMass, "P(Yes) + P(No) == 0");
  return p_yes / mass;
}

std::vector<YesNo> StubScoreProvider::score(std::span<const QualityPrompt> prompts) {
  std::vector<YesNo> out;
  out.reserve(prompts.size());
  for (const auto& p : prompts) {
    if (constant_) {
      out.push_back(*constant_);
      continue;
    }
    const uint64_t h = Fnv1a().update(to_string(p.dimension)).update(p.text).digest();
    out.push_back({static_cast<double>((h & 0xffff) + 1) / 65536.0,
                   static_cast<double>(((h >> 16) & 0xffff) + 1) / 65536.0});
  }
  return out;
}

double score_dimension(const EvalInstance& instance, QualityDimension dimension,
                       ScoreProvider& provider, size_t token_budget) {
  if (instance.predictions.empty()) {
    throw Error(ErrorCode::kEmptyPredictions, "document '" + instance.id + "' has no predictions");
  }
  std::vector<QualityPrompt> prompts;
  prompts.reserve(instance.predictions.size());
  if (dimension == QualityDimension::kNaturalness) {
    for (const auto& p : instance.predictions) prompts.push_back(build_naturalness_prompt(p));
  } else {
    const std::string doc = faithfulness_document(instance, token_budget);
    for (const auto& p : instance.predictions) prompts.push_back(build_faithfulness_prompt(p, doc));
  }
  std::vector<YesNo> answers;
  try {
    answers = provider.score(prompts);
  } catch (const Error& e) {
    throw Error(e.code(), e.message() + " (while scoring " +
                              std::to_string(prompts.size()) + " " +
                              std::string(to_string(dimension)) + " prompts for '" +
                              instance.id + "')");
  }
  if (answers.size() != prompts.size()) {
    throw Error(ErrorCode::kProviderProtocol,
                provider.identity() + " answered " + std::to_string(answers.size()) + " of " +
                    std::to_string(prompts.size()) + " prompts");
  }
  double sum = 0.0;
  for (const auto& a : answers) sum += boolean_qa_score(a.p_yes, a.p_no);
  return sum / static_cast<double>(answers.size());
}

}  // namespace kpeval
