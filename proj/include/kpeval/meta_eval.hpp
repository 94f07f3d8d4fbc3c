#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kpeval/embedding.hpp"

namespace kpeval {

// Correlation coefficients. All require equal lengths >= 2 (kLengthMismatch,
// kInvalidArgument otherwise).

// Product-moment correlation. Throws kZeroVariance.
double pearson(std::span<const double> x, std::span<const double> y);

// Ranks starting at 1; tied values share the mean of their positions.
std::vector<double> fractional_ranks(std::span<const double> values);

// Pearson over fractional ranks. Throws kZeroVariance.
double spearman(std::span<const double> x, std::span<const double> y);

// Kendall tau-b, (C - D) / sqrt((n0 - tx)(n0 - ty)), computed in O(n log n).
// Throws kAllTied when either side is constant.
double kendall_tau(std::span<const double> x, std::span<const double> y);

enum class CorrelationStat { kPearson, kSpearman, kKendall };

std::string_view to_string(CorrelationStat s);
CorrelationStat parse_correlation_stat(std::string_view name);

double correlate(CorrelationStat stat, std::span<const double> x, std::span<const double> y);

struct PairedItem {
  std::string input_id;
  double metric_value = 0.0;
  double human_value = 0.0;
};

// At least two items, distinct input ids, finite values.
class PairedScores {
 public:
  explicit PairedScores(std::vector<PairedItem> items);

  const std::vector<PairedItem>& items() const noexcept { return items_; }
  size_t size() const noexcept { return items_.size(); }
  std::vector<double> metric_values() const;
  std::vector<double> human_values() const;

 private:
  std::vector<PairedItem> items_;
};

struct CorrelationResult {
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  double kendall_tau = 0.0;
  size_t n = 0;
  // Interval for `stat`.
  CorrelationStat stat = CorrelationStat::kKendall;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  size_t n_resamples = 0;
  size_t n_degenerate = 0;
  double level = 0.95;
  std::string method = "percentile";
};

// Point estimates of all three coefficients, no interval.
CorrelationResult correlate_all(const PairedScores& paired);

struct BootstrapOptions {
  size_t n_resamples = 1000;
  double level = 0.95;
  uint64_t seed = 0;
  // Resamples are split across threads; results do not depend on this.
  size_t threads = 1;
};

// Input-level percentile bootstrap: resample items with replacement,
// recompute `stat`, and take the (1-level)/2 and 1-(1-level)/2 quantiles
// (linear interpolation). Resamples with zero variance are skipped and
// counted; more than half skipped throws kTooFewValid.
CorrelationResult bootstrap_ci(const PairedScores& paired, CorrelationStat stat,
                               const BootstrapOptions& options = {});

// Mean cosine over (phrase, variant) pairs. Throws kEmptySet.
double alignment(std::span<const std::pair<std::string, std::string>> pairs,
                 EmbeddingProvider& provider);

// Mean cosine over `n_pairs` random pairs of distinct phrases, drawn with
// replacement across draws. Throws kTooFewPhrases with fewer than two
// distinct phrases.
double uniformity(std::span<const std::string> phrases, EmbeddingProvider& provider,
                  size_t n_pairs = 50000, uint64_t seed = 0);

struct EmbeddingDiagnostics {
  double alignment = 0.0;
  double uniformity = 0.0;
  double delta() const { return alignment - uniformity; }
};

// ---- input files ----

struct HumanJudgment {
  std::string input_id;
  std::string system_id;
  std::string dimension;
  double value = 0.0;
};

// Line-delimited records {"input_id", "system_id", "dimension", "value"}.
std::vector<HumanJudgment> load_human_judgments(const std::filesystem::path& path);

// Line-delimited records {"phrase", "variant"}.
std::vector<std::pair<std::string, std::string>> load_variation_pairs(
    const std::filesystem::path& path);

// Joins per-document metric values with the human judgments for one
// dimension (and optionally one system). Repeated judgments of an input are
// averaged. Judgments whose input id is not in `known_ids` throw
// kUnmatchedIds listing the orphans; inputs without a metric value are
// dropped.
PairedScores pair_scores(const std::map<std::string, double>& metric_values,
                         std::span<const HumanJudgment> judgments, std::string_view dimension,
                         const std::set<std::string>& known_ids,
                         std::optional<std::string_view> system_id = std::nullopt);

}  // namespace kpeval
