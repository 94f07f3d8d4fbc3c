#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpeval/embedding.hpp"
#include "kpeval/phrase.hpp"

namespace kpeval {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// F1 is the harmonic mean, 0 when precision + recall == 0.
PRF make_prf(double precision, double recall);

// Stem keys equal.
bool exact_match(const Phrase& a, const Phrase& b);
// Either stem key is a contiguous, token-aligned substring of the other.
bool substring_match(const Phrase& a, const Phrase& b);

// All lexical metrics throw Error(kEmptyReferences) when Y is empty. An empty
// prediction list scores precision 0.
PRF exact_match_prf(std::span<const Phrase> predictions, std::span<const Phrase> references);
PRF substring_match_prf(std::span<const Phrase> predictions, std::span<const Phrase> references);

// Share of the top-|Y| predictions that substring-match some reference. The
// denominator is |Y| even when fewer predictions exist.
double r_precision(std::span<const Phrase> predictions, std::span<const Phrase> references);

size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// LCS over the concatenated stem sequences (predictions in rank order,
// references in dataset order).
PRF rouge_l_prf(std::span<const Phrase> predictions, std::span<const Phrase> references);

// Dense row-major table of sim(prediction i, reference j).
class SimilarityMatrix {
 public:
  SimilarityMatrix(size_t rows, size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  size_t rows() const noexcept { return rows_; }
  size_t cols() const noexcept { return cols_; }
  double& at(size_t r, size_t c) { return values_[r * cols_ + c]; }
  double at(size_t r, size_t c) const { return values_[r * cols_ + c]; }

 private:
  size_t rows_;
  size_t cols_;
  std::vector<double> values_;
};

SimilarityMatrix similarity_matrix(std::span<const EmbeddingVector> rows,
                                   std::span<const EmbeddingVector> cols);

// Semantic precision/recall from a precomputed similarity table:
//   SemP = mean_i max_j 1(sim_ij > alpha) * sim_ij
//   SemR = mean_j max_i 1(sim_ij > alpha) * sim_ij
// The max over an empty set is 0, so no predictions gives (0, 0, 0).
// Throws kEmptyReferences when the table has no columns.
PRF sem_prf_from_similarities(const SimilarityMatrix& sims, double alpha = 0.0);

PRF sem_prf(std::span<const Phrase> predictions, std::span<const Phrase> references,
            EmbeddingProvider& provider, double alpha = 0.0);

// Cosine between the max-pooled representations of P and Y.
double sem_cov(std::span<const Phrase> predictions, std::span<const Phrase> references,
               EmbeddingProvider& provider);

enum class MatchStrategy { kExact, kSubstring, kSemantic };

std::string_view to_string(MatchStrategy s);

struct MatchDecision {
  Phrase source_phrase;
  std::optional<Phrase> best_match;
  std::optional<size_t> best_index;
  double score = 0.0;
  MatchStrategy strategy = MatchStrategy::kExact;
};

// Best candidate for `phrase` in `candidates`; ties go to the earliest
// candidate. `provider` is required for the semantic strategy only.
MatchDecision match_phrase_to_set(const Phrase& phrase, std::span<const Phrase> candidates,
                                  MatchStrategy strategy, EmbeddingProvider* provider = nullptr,
                                  double alpha = 0.0);

}  // namespace kpeval
