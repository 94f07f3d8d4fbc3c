#include "kpeval/diversity.hpp"

#include <unordered_set>

namespace kpeval {

double dup_token_ratio(std::span<const Phrase> predictions) {
  size_t total = 0;
  std::unordered_set<std::string_view> distinct;
  for (const auto& p : predictions) {
    total += p.stems().size();
    for (const auto& s : p.stems()) distinct.insert(s);
  }
  if (total <= 1) return 0.0;
  return 1.0 - static_cast<double>(distinct.size()) / static_cast<double>(total);
}

double emb_sim(std::span<const EmbeddingVector> vectors) {
  const size_t m = vectors.size();
  if (m < 2) return 0.0;
  double sum = 0.0;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      if (i != j) sum += cos_sim(vectors[i], vectors[j]);
    }
  }
  return sum / static_cast<double>(m * (m - 1));
}

double emb_sim(std::span<const Phrase> predictions, EmbeddingProvider& provider) {
  if (predictions.size() < 2) return 0.0;
  return emb_sim(provider.embed(raw_texts(predictions)));
}

}  // namespace kpeval
