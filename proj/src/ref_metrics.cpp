#include "kpeval/ref_metrics.hpp"

#include <algorithm>

#include "kpeval/error.hpp"

namespace kpeval {
namespace {

void require_references(std::span<const Phrase> references) {
  if (references.empty()) {
    throw Error(ErrorCode::kEmptyReferences, "reference set is empty");
  }
}

template <typename Match>
PRF matched_prf(std::span<const Phrase> predictions, std::span<const Phrase> references,
                Match match) {
  require_references(references);
  size_t matched_predictions = 0;
  for (const auto& p : predictions) {
    if (std::any_of(references.begin(), references.end(),
                    [&](const Phrase& y) { return match(p, y); })) {
      ++matched_predictions;
    }
  }
  size_t matched_references = 0;
  for (const auto& y : references) {
    if (std::any_of(predictions.begin(), predictions.end(),
                    [&](const Phrase& p) { return match(p, y); })) {
      ++matched_references;
    }
  }
  const double precision =
      predictions.empty() ? 0.0
                          : static_cast<double>(matched_predictions) / predictions.size();
  const double recall = static_cast<double>(matched_references) / references.size();
  return make_prf(precision, recall);
}

std::vector<std::string> concat_stems(std::span<const Phrase> phrases) {
  std::vector<std::string> out;
  for (const auto& p : phrases) out.insert(out.end(), p.stems().begin(), p.stems().end());
  return out;
}

std::vector<EmbeddingVector> embed_phrases(std::span<const Phrase> phrases,
                                           EmbeddingProvider& provider) {
  return provider.embed(raw_texts(phrases));
}

double thresholded(double sim, double alpha) { return sim > alpha ? sim : 0.0; }

}  // namespace

PRF make_prf(double precision, double recall) {
  const double denom = precision + recall;
  return {precision, recall, denom > 0.0 ? 2.0 * precision * recall / denom : 0.0};
}

bool exact_match(const Phrase& a, const Phrase& b) { return a.stem_key() == b.stem_key(); }

bool substring_match(const Phrase& a, const Phrase& b) {
  // Padding with spaces forces matches to start and end on token boundaries.
  const std::string pa = " " + a.stem_key() + " ";
  const std::string pb = " " + b.stem_key() + " ";
  return pa.find(pb) != std::string::npos || pb.find(pa) != std::string::npos;
}

PRF exact_match_prf(std::span<const Phrase> predictions, std::span<const Phrase> references) {
  return matched_prf(predictions, references, exact_match);
}

PRF substring_match_prf(std::span<const Phrase> predictions,
                        std::span<const Phrase> references) {
  return matched_prf(predictions, references, substring_match);
}

double r_precision(std::span<const Phrase> predictions, std::span<const Phrase> references) {
  require_references(references);
  const size_t r = references.size();
  const auto top = predictions.first(std::min(r, predictions.size()));
  const auto hits = std::count_if(top.begin(), top.end(), [&](const Phrase& p) {
    return std::any_of(references.begin(), references.end(),
                       [&](const Phrase& y) { return substring_match(p, y); });
  });
  return static_cast<double>(hits) / static_cast<double>(r);
}

size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<size_t> prev(b.size() + 1, 0);
  std::vector<size_t> cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

PRF rouge_l_prf(std::span<const Phrase> predictions, std::span<const Phrase> references) {
  require_references(references);
  const auto pred = concat_stems(predictions);
  const auto ref = concat_stems(references);
  if (pred.empty()) return make_prf(0.0, 0.0);
  const double lcs = static_cast<double>(lcs_length(pred, ref));
  return make_prf(lcs / pred.size(), lcs / ref.size());
}

SimilarityMatrix similarity_matrix(std::span<const EmbeddingVector> rows,
                                   std::span<const EmbeddingVector> cols) {
  SimilarityMatrix m(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < cols.size(); ++j) m.at(i, j) = cos_sim(rows[i], cols[j]);
  }
  return m;
}

PRF sem_prf_from_similarities(const SimilarityMatrix& sims, double alpha) {
  if (sims.cols() == 0) throw Error(ErrorCode::kEmptyReferences, "reference set is empty");
  double precision = 0.0;
  if (sims.rows() > 0) {
    double sum = 0.0;
    for (size_t i = 0; i < sims.rows(); ++i) {
      double best = 0.0;
      for (size_t j = 0; j < sims.cols(); ++j) {
        const double v = thresholded(sims.at(i, j), alpha);
        best = j == 0 ? v : std::max(best, v);
      }
      sum += best;
    }
    precision = sum / static_cast<double>(sims.rows());
  }
  double sum = 0.0;
  for (size_t j = 0; j < sims.cols(); ++j) {
    double best = 0.0;
    for (size_t i = 0; i < sims.rows(); ++i) {
      const double v = thresholded(sims.at(i, j), alpha);
      best = i == 0 ? v : std::max(best, v);
    }
    sum += best;
  }
  return make_prf(precision, sum / static_cast<double>(sims.cols()));
}

PRF sem_prf(std::span<const Phrase> predictions, std::span<const Phrase> references,
            EmbeddingProvider& provider, double alpha) {
  require_references(references);
  const auto ref_vecs = embed_phrases(references, provider);
  const auto pred_vecs =
      predictions.empty() ? std::vector<EmbeddingVector>{} : embed_phrases(predictions, provider);
  return sem_prf_from_similarities(similarity_matrix(pred_vecs, ref_vecs), alpha);
}

double sem_cov(std::span<const Phrase> predictions, std::span<const Phrase> references,
               EmbeddingProvider& provider) {
  if (predictions.empty() || references.empty()) {
    throw Error(ErrorCode::kEmptySet, "coverage needs non-empty predictions and references");
  }
  const auto pred_vecs = embed_phrases(predictions, provider);
  const auto ref_vecs = embed_phrases(references, provider);
  return cos_sim(max_pool_union(pred_vecs), max_pool_union(ref_vecs));
}

std::string_view to_string(MatchStrategy s) {
  switch (s) {
    case MatchStrategy::kExact: return "exact";
    case MatchStrategy::kSubstring: return "substring";
    case MatchStrategy::kSemantic: return "semantic";
  }
  return "unknown";
}

MatchDecision match_phrase_to_set(const Phrase& phrase, std::span<const Phrase> candidates,
                                  MatchStrategy strategy, EmbeddingProvider* provider,
                                  double alpha) {
  if (candidates.empty()) throw Error(ErrorCode::kEmptySet, "candidate set is empty");
  MatchDecision d{phrase, std::nullopt, std::nullopt, 0.0, strategy};
  auto accept = [&](size_t i, double score) {
    d.best_index = i;
    d.best_match = candidates[i];
    d.score = score;
  };
  if (strategy == MatchStrategy::kSemantic) {
    if (provider == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "semantic matching needs an embedding provider");
    }
    const auto source = provider->embed_one(phrase.raw());
    const auto vecs = embed_phrases(candidates, *provider);
    for (size_t i = 0; i < vecs.size(); ++i) {
      const double sim = cos_sim(source, vecs[i]);
      if (sim > alpha && (!d.best_index || sim > d.score)) accept(i, sim);
    }
    return d;
  }
  const auto match = strategy == MatchStrategy::kExact ? exact_match : substring_match;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (match(phrase, candidates[i])) {
      accept(i, 1.0);
      break;
    }
  }
  return d;
}

}  // namespace kpeval
