#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kpeval/dataset.hpp"
#include "kpeval/embedding.hpp"
#include "kpeval/meta_eval.hpp"
#include "kpeval/quality.hpp"
#include "kpeval/retrieval.hpp"

namespace kpeval {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

enum class Dimension {
  kNaturalness,
  kFaithfulness,
  kSaliency,
  kCoverage,
  kDiversity,
  kUtility,
  // Exact / substring / R-precision / Rouge-L baselines.
  kLexical,
};

std::string_view to_string(Dimension d);
Dimension parse_dimension(std::string_view name);
// The six evaluation dimensions, without the lexical baselines.
std::set<Dimension> all_dimensions();

struct EvalConfig {
  std::filesystem::path instances_path;
  std::optional<std::filesystem::path> corpus_path;
  std::set<Dimension> dimensions = all_dimensions();
  std::string system_name = "system";
  double alpha = 0.0;
  size_t k = 5;
  size_t base = 5;
  std::set<RetrieverKind> retrievers = {RetrieverKind::kBm25, RetrieverKind::kDense};
  size_t token_budget = 512;
  bool dedupe = false;

  std::optional<std::filesystem::path> embeddings_file;
  std::optional<std::string> embed_url;
  std::optional<std::string> score_url;
  std::optional<std::string> rerank_url;
  bool stub_scorer = false;

  std::optional<std::filesystem::path> index_dir;
  std::filesystem::path output_dir = ".";
  size_t workers = 1;
  // ISO-8601; when absent, SOURCE_DATE_EPOCH or the wall clock is used.
  std::optional<std::string> timestamp;
};

// Canonical JSON of the result-affecting fields, and its hash.
nlohmann::json config_json(const EvalConfig& config);
std::string config_hash(const EvalConfig& config);

struct Providers {
  std::shared_ptr<EmbeddingProvider> embedding;
  std::shared_ptr<ScoreProvider> scorer;
  std::shared_ptr<Reranker> reranker;
};

// Builds the providers named by the config (file/http embeddings, stub/http
// scorer, http reranker).
Providers make_providers(const EvalConfig& config);

// Fails fast (Error(kConfig)) when a requested dimension lacks its provider.
void validate(const EvalConfig& config, const Providers& providers);

struct DocumentRecord {
  std::string id;
  std::map<std::string, double> metrics;
  std::vector<std::string> flags;
};

// A dimension not computed for a document, with a machine-readable reason.
struct SkipRecord {
  std::string id;
  std::string dimension;
  std::string reason;
};

struct ReportMetadata {
  std::string config_hash;
  std::string toolkit_version;
  std::map<std::string, std::string> providers;
  std::string timestamp;
  std::string system_name;
  size_t k = 5;
  size_t base = 5;
  double alpha = 0.0;
};

struct DimensionReport {
  // Sorted by id.
  std::vector<DocumentRecord> per_document;
  // Mean over the documents where each metric is defined.
  std::map<std::string, double> aggregate;
  std::map<std::string, size_t> defined_counts;
  std::vector<SkipRecord> skips;
  ReportMetadata metadata;
};

DimensionReport run_eval(const EvalConfig& config);
DimensionReport run_eval(const EvalConfig& config, const Providers& providers);

// Arithmetic means of every metric over the documents that define it.
void aggregate(DimensionReport& report);

enum class ReportFormat { kMachine, kTable };

// Writes report.jsonl (metadata, one record per document, skips, aggregate)
// and/or report.txt (the per-dimension summary table). Returns written paths.
std::vector<std::filesystem::path> emit_report(const DimensionReport& report,
                                               const std::filesystem::path& dir,
                                               const std::set<ReportFormat>& formats);

std::string render_machine_report(const DimensionReport& report);
std::string render_table(const DimensionReport& report);

// The eleven summary columns: #KP, SemP, SemR, SemF1, SemCov, Naturalness,
// Faithfulness, dup, emb_sim, RR@k, Spare_base@k.
std::vector<std::string> summary_columns(size_t k, size_t base);

// ---- meta-evaluation ----

struct MetricTarget {
  std::string metric;           // e.g. "sem_f1"
  std::string human_dimension;  // dimension name in the judgment file
};

struct MetaEvalConfig {
  EvalConfig eval;
  std::filesystem::path judgments_path;
  std::vector<MetricTarget> targets;
  std::optional<std::string> system_id;
  CorrelationStat stat = CorrelationStat::kKendall;
  BootstrapOptions bootstrap;
};

struct MetaEvalRow {
  MetricTarget target;
  CorrelationResult result;
};

// Which evaluation dimension produces a metric name.
Dimension dimension_for_metric(std::string_view metric);

std::vector<MetaEvalRow> run_meta_eval(const MetaEvalConfig& config);
std::vector<MetaEvalRow> run_meta_eval(const MetaEvalConfig& config, const Providers& providers);

// Correlates already-computed metric values with judgments.
std::vector<MetaEvalRow> correlate_report(const DimensionReport& report,
                                          std::span<const HumanJudgment> judgments,
                                          const MetaEvalConfig& config);

std::string render_meta_eval_jsonl(std::span<const MetaEvalRow> rows);
std::string render_meta_eval_table(std::span<const MetaEvalRow> rows);

// ---- indexes ----

// Builds the configured retrievers, loading cached indexes from
// config.index_dir when present and valid for this corpus.
struct RetrieverSet {
  std::shared_ptr<const Bm25Index> bm25;
  std::shared_ptr<const DenseIndex> dense;
  std::shared_ptr<const RerankRetriever> rerank;
  std::vector<const Retriever*> active;
};

RetrieverSet build_retrievers(const EvalConfig& config, const Dataset& dataset,
                              const Providers& providers);

// Writes bm25.index.jsonl (and dense.index.jsonl when an embedding provider
// is configured) into `dir`. Returns written paths.
std::vector<std::filesystem::path> write_indexes(const EvalConfig& config, const Dataset& dataset,
                                                 const Providers& providers,
                                                 const std::filesystem::path& dir);

}  // namespace kpeval
