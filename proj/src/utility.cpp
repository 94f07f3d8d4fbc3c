#include "kpeval/utility.hpp"

#include <algorithm>

#include "kpeval/error.hpp"

namespace kpeval {
namespace {

void require_indexed(const EvalInstance& instance, const Retriever& r) {
  if (!r.contains(instance.id)) {
    throw Error(ErrorCode::kMissingDoc, "document '" + instance.id + "' is not in the " +
                                            std::string(to_string(r.kind())) + " index");
  }
}

void require_retrievers(std::span<const Retriever* const> retrievers) {
  if (retrievers.empty()) throw Error(ErrorCode::kInvalidArgument, "no retrievers configured");
}

bool retrieved_in_top_k(const Retriever& r, std::string_view query, std::string_view id,
                        size_t k) {
  return r.retrieve(query, k).rank_of(id).has_value();
}

}  // namespace

std::string build_query(std::span<const Phrase> predictions) {
  return join_raw(predictions, " ; ");
}

double rr_at_k(const EvalInstance& instance, std::span<const Retriever* const> retrievers,
               size_t k) {
  require_retrievers(retrievers);
  for (const Retriever* r : retrievers) require_indexed(instance, *r);
  if (instance.predictions.empty()) return 0.0;
  const std::string query = build_query(instance.predictions);
  double sum = 0.0;
  for (const Retriever* r : retrievers) {
    if (auto rank = r->retrieve(query, k).rank_of(instance.id)) {
      sum += 1.0 / static_cast<double>(*rank);
    }
  }
  return sum / static_cast<double>(retrievers.size());
}

std::optional<size_t> minimal_retrieving_prefix(const EvalInstance& instance,
                                                const Retriever& retriever, size_t k,
                                                size_t max_prefix) {
  require_indexed(instance, retriever);
  const auto& preds = instance.predictions;
  const size_t limit = std::min(preds.size(), max_prefix);
  for (size_t j = 1; j <= limit; ++j) {
    const std::string query = build_query(std::span<const Phrase>(preds).first(j));
    if (retrieved_in_top_k(retriever, query, instance.id, k)) return j;
  }
  return std::nullopt;
}

double spare_score(std::optional<size_t> j, size_t base) {
  if (base == 0) throw Error(ErrorCode::kInvalidArgument, "spare base must be >= 1");
  const size_t used = j ? std::min(base, *j) : base;
  return 1.0 - static_cast<double>(used) / static_cast<double>(base);
}

double spare(const EvalInstance& instance, std::span<const Retriever* const> retrievers,
             size_t k, size_t base) {
  require_retrievers(retrievers);
  if (base == 0) throw Error(ErrorCode::kInvalidArgument, "spare base must be >= 1");
  double sum = 0.0;
  for (const Retriever* r : retrievers) {
    // Prefixes longer than base all score 0, so the scan can stop there.
    sum += spare_score(minimal_retrieving_prefix(instance, *r, k, base), base);
  }
  return sum / static_cast<double>(retrievers.size());
}

}  // namespace kpeval
