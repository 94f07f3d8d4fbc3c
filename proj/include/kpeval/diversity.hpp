#pragma once

#include <span>

#include "kpeval/embedding.hpp"
#include "kpeval/phrase.hpp"

namespace kpeval {

// 1 - distinct stems / total stems over all of P, counting repeats inside a
// single phrase too. 0 when P holds at most one stem.
double dup_token_ratio(std::span<const Phrase> predictions);

// Mean cosine over ordered pairs (i, j), i != j. 0 when |P| < 2.
double emb_sim(std::span<const Phrase> predictions, EmbeddingProvider& provider);
double emb_sim(std::span<const EmbeddingVector> vectors);

}  // namespace kpeval
