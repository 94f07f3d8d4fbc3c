#pragma once

#include <optional>
#include <span>
#include <string>

#include "kpeval/dataset.hpp"
#include "kpeval/retrieval.hpp"

namespace kpeval {

// Predictions joined with " ; " in rank order.
std::string build_query(std::span<const Phrase> predictions);

// Reciprocal rank of the instance's own document among the top k when the
// full prediction list is the query, averaged over retrievers. An empty
// prediction list scores 0. Throws Error(kMissingDoc) if a retriever does
// not index the instance.
double rr_at_k(const EvalInstance& instance, std::span<const Retriever* const> retrievers,
               size_t k);

// Smallest j (1-based) such that querying with the first j predictions puts
// the instance's document in the top k, scanning j = 1, 2, ... up to
// min(|P|, max_prefix).
std::optional<size_t> minimal_retrieving_prefix(const EvalInstance& instance,
                                                const Retriever& retriever, size_t k,
                                                size_t max_prefix);

// 1 - min(base, j) / base, with a missing j counting as >= base.
double spare_score(std::optional<size_t> j, size_t base);

// Spare_base@k averaged over retrievers.
double spare(const EvalInstance& instance, std::span<const Retriever* const> retrievers,
             size_t k, size_t base = 5);

}  // namespace kpeval
