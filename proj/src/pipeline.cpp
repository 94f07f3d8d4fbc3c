#include "kpeval/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <thread>

#include "kpeval/diversity.hpp"
#include "kpeval/error.hpp"
#include "kpeval/hashing.hpp"
#include "kpeval/ref_metrics.hpp"
#include "kpeval/sidecar.hpp"
#include "kpeval/utility.hpp"

namespace kpeval {
namespace {

using json = nlohmann::json;

constexpr const char* kBm25IndexFile = "bm25.index.jsonl";
constexpr const char* kDenseIndexFile = "dense.index.jsonl";

std::string iso8601_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string resolve_timestamp(const EvalConfig& config) {
  if (config.timestamp) return *config.timestamp;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') return iso8601_utc(static_cast<std::time_t>(v));
  }
  return iso8601_utc(std::time(nullptr));
}

bool wants(const EvalConfig& c, Dimension d) { return c.dimensions.contains(d); }

std::set<RetrieverKind> effective_retrievers(const EvalConfig& config, const Providers& p) {
  auto kinds = config.retrievers;
  if (p.reranker) kinds.insert(RetrieverKind::kRerank);
  return kinds;
}

// Rethrows provider/IO failures with the stage and document attached.
template <typename Fn>
void stage(std::string_view name, const std::string& doc_id, Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    throw Error(e.code(), "stage '" + std::string(name) + "' on document '" + doc_id +
                              "': " + e.message());
  }
}

// A cached index for another corpus or provider is ignored and rebuilt.
template <typename Index, typename Load>
std::shared_ptr<const Index> try_load(Load load) {
  try {
    return std::make_shared<const Index>(load());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConfig) throw;
    return nullptr;
  }
}

struct DocumentOutcome {
  DocumentRecord record;
  std::vector<SkipRecord> skips;
};

DocumentOutcome evaluate_document(const EvalInstance& inst, const EvalConfig& cfg,
                                  const Providers& pv, const RetrieverSet& rs) {
  DocumentOutcome out;
  auto& rec = out.record;
  rec.id = inst.id;
  auto& m = rec.metrics;
  const auto& P = inst.predictions;
  const auto& Y = inst.references;
  auto skip = [&](Dimension d, const char* reason) {
    out.skips.push_back({inst.id, std::string(to_string(d)), reason});
  };
  auto flag = [&](const char* f) {
    if (std::find(rec.flags.begin(), rec.flags.end(), f) == rec.flags.end()) rec.flags.push_back(f);
  };

  m["num_kp"] = static_cast<double>(P.size());
  if (P.empty()) flag("empty_predictions");

  if (wants(cfg, Dimension::kLexical)) {
    if (Y.empty()) {
      skip(Dimension::kLexical, "empty_references");
    } else {
      const PRF exact = exact_match_prf(P, Y);
      const PRF sub = substring_match_prf(P, Y);
      const PRF rouge = rouge_l_prf(P, Y);
      m["exact_p"] = exact.precision;
      m["exact_r"] = exact.recall;
      m["exact_f1"] = exact.f1;
      m["substring_p"] = sub.precision;
      m["substring_r"] = sub.recall;
      m["substring_f1"] = sub.f1;
      m["r_precision"] = r_precision(P, Y);
      m["rouge_l_p"] = rouge.precision;
      m["rouge_l_r"] = rouge.recall;
      m["rouge_l_f1"] = rouge.f1;
    }
  }

  if (wants(cfg, Dimension::kSaliency)) {
    if (Y.empty()) {
      skip(Dimension::kSaliency, "empty_references");
    } else {
      stage("saliency", inst.id, [&] {
        const PRF sem = sem_prf(P, Y, *pv.embedding, cfg.alpha);
        m["sem_p"] = sem.precision;
        m["sem_r"] = sem.recall;
        m["sem_f1"] = sem.f1;
      });
    }
  }

  if (wants(cfg, Dimension::kCoverage)) {
    if (Y.empty()) {
      skip(Dimension::kCoverage, "empty_references");
    } else if (P.empty()) {
      skip(Dimension::kCoverage, "empty_predictions");
    } else {
      stage("coverage", inst.id, [&] { m["sem_cov"] = sem_cov(P, Y, *pv.embedding); });
    }
  }

  if (wants(cfg, Dimension::kDiversity)) {
    size_t stems = 0;
    for (const auto& p : P) stems += p.stems().size();
    if (P.size() < 2 || stems <= 1) flag("degenerate_diversity");
    m["dup_token_ratio"] = dup_token_ratio(P);
    stage("diversity", inst.id, [&] { m["emb_sim"] = emb_sim(P, *pv.embedding); });
  }

  if (wants(cfg, Dimension::kUtility)) {
    stage("utility", inst.id, [&] {
      m["rr_at_k"] = rr_at_k(inst, rs.active, cfg.k);
      m["spare"] = spare(inst, rs.active, cfg.k, cfg.base);
    });
  }

  for (Dimension d : {Dimension::kNaturalness, Dimension::kFaithfulness}) {
    if (!wants(cfg, d)) continue;
    if (P.empty()) {
      skip(d, "empty_predictions");
      continue;
    }
    const auto qd = d == Dimension::kNaturalness ? QualityDimension::kNaturalness
                                                 : QualityDimension::kFaithfulness;
    if (qd == QualityDimension::kFaithfulness &&
        !build_faithfulness_prompt(P.front(), faithfulness_document(inst, cfg.token_budget))
             .warnings.empty()) {
      flag("empty_document");
    }
    stage(to_string(d), inst.id, [&] {
      m[std::string(to_string(d))] = score_dimension(inst, qd, *pv.scorer, cfg.token_budget);
    });
  }
  return out;
}

std::string fmt_value(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string render_rows(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> widths(header.size());
  for (size_t c = 0; c < header.size(); ++c) {
    widths[c] = header[c].size();
    for (const auto& r : rows) widths[c] = std::max(widths[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) s += " | ";
      s += cells[c];
      if (c + 1 < cells.size()) s += std::string(widths[c] - cells[c].size(), ' ');
    }
    return s + "\n";
  };
  std::string out = line(header);
  std::string rule;
  for (size_t c = 0; c < widths.size(); ++c) {
    if (c > 0) rule += "-+-";
    rule += std::string(widths[c], '-');
  }
  out += rule + "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

json metadata_json(const ReportMetadata& md) {
  return {{"type", "metadata"},
          {"config_hash", md.config_hash},
          {"toolkit_version", md.toolkit_version},
          {"providers", md.providers},
          {"timestamp", md.timestamp},
          {"system", md.system_name},
          {"k", md.k},
          {"base", md.base},
          {"alpha", md.alpha}};
}

}  // namespace

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::kNaturalness: return "naturalness";
    case Dimension::kFaithfulness: return "faithfulness";
    case Dimension::kSaliency: return "saliency";
    case Dimension::kCoverage: return "coverage";
    case Dimension::kDiversity: return "diversity";
    case Dimension::kUtility: return "utility";
    case Dimension::kLexical: return "lexical";
  }
  return "unknown";
}

Dimension parse_dimension(std::string_view name) {
  for (Dimension d : {Dimension::kNaturalness, Dimension::kFaithfulness, Dimension::kSaliency,
                      Dimension::kCoverage, Dimension::kDiversity, Dimension::kUtility,
                      Dimension::kLexical}) {
    if (to_string(d) == name) return d;
  }
  throw Error(ErrorCode::kConfig, "unknown dimension '" + std::string(name) + "'");
}

std::set<Dimension> all_dimensions() {
  return {Dimension::kNaturalness, Dimension::kFaithfulness, Dimension::kSaliency,
          Dimension::kCoverage,    Dimension::kDiversity,    Dimension::kUtility};
}

json config_json(const EvalConfig& c) {
  std::vector<std::string> dims;
  for (Dimension d : c.dimensions) dims.emplace_back(to_string(d));
  std::vector<std::string> retrievers;
  for (RetrieverKind r : c.retrievers) retrievers.emplace_back(to_string(r));
  auto opt = [](const auto& v) -> json {
    if (!v) return nullptr;
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::filesystem::path>) {
      return v->string();
    } else {
      return *v;
    }
  };
  return {{"instances", c.instances_path.string()},
          {"corpus", opt(c.corpus_path)},
          {"dimensions", dims},
          {"system", c.system_name},
          {"alpha", c.alpha},
          {"k", c.k},
          {"base", c.base},
          {"retrievers", retrievers},
          {"token_budget", c.token_budget},
          {"dedupe", c.dedupe},
          {"embeddings_file", opt(c.embeddings_file)},
          {"embed_url", opt(c.embed_url)},
          {"score_url", opt(c.score_url)},
          {"rerank_url", opt(c.rerank_url)},
          {"stub_scorer", c.stub_scorer}};
}

std::string config_hash(const EvalConfig& config) {
  return Fnv1a().update(config_json(config).dump()).hex();
}

Providers make_providers(const EvalConfig& config) {
  Providers p;
  if (config.embeddings_file && config.embed_url) {
    throw Error(ErrorCode::kConfig, "choose either an embeddings file or an embedding URL");
  }
  if (config.embeddings_file) {
    p.embedding = TableEmbeddingProvider::load(*config.embeddings_file);
  } else if (config.embed_url) {
    p.embedding = std::make_shared<HttpEmbeddingProvider>(SidecarClient(*config.embed_url));
  }
  if (config.stub_scorer && config.score_url) {
    throw Error(ErrorCode::kConfig, "choose either the stub scorer or a score URL");
  }
  if (config.stub_scorer) {
    p.scorer = std::make_shared<StubScoreProvider>();
  } else if (config.score_url) {
    p.scorer = std::make_shared<HttpScoreProvider>(SidecarClient(*config.score_url));
  }
  if (config.rerank_url) {
    p.reranker = std::make_shared<HttpReranker>(SidecarClient(*config.rerank_url));
  }
  return p;
}

void validate(const EvalConfig& config, const Providers& providers) {
  if (config.dimensions.empty()) throw Error(ErrorCode::kConfig, "no dimensions requested");
  if (config.k == 0) throw Error(ErrorCode::kConfig, "k must be >= 1");
  if (config.base == 0) throw Error(ErrorCode::kConfig, "base must be >= 1");
  if (config.workers == 0) throw Error(ErrorCode::kConfig, "workers must be >= 1");
  if (config.token_budget == 0) throw Error(ErrorCode::kConfig, "token budget must be >= 1");
  for (Dimension d : {Dimension::kSaliency, Dimension::kCoverage, Dimension::kDiversity}) {
    if (wants(config, d) && !providers.embedding) {
      throw Error(ErrorCode::kConfig, std::string(to_string(d)) +
                                          " needs an embedding provider (--embeddings or "
                                          "--embed-url)");
    }
  }
  if (wants(config, Dimension::kUtility)) {
    const auto kinds = effective_retrievers(config, providers);
    if (kinds.empty()) throw Error(ErrorCode::kConfig, "utility needs at least one retriever");
    if ((kinds.contains(RetrieverKind::kDense) || kinds.contains(RetrieverKind::kRerank)) &&
        !providers.embedding) {
      throw Error(ErrorCode::kConfig,
                  "dense and rerank retrieval need an embedding provider (or --retrievers bm25)");
    }
    if (kinds.contains(RetrieverKind::kRerank) && !providers.reranker) {
      throw Error(ErrorCode::kConfig, "rerank retrieval needs --rerank-url");
    }
  }
  for (Dimension d : {Dimension::kNaturalness, Dimension::kFaithfulness}) {
    if (wants(config, d) && !providers.scorer) {
      throw Error(ErrorCode::kConfig, std::string(to_string(d)) +
                                          " needs a score provider (--stub-scorer or --score-url)");
    }
  }
}

namespace {

// Missing or stale cache entries are filled in after a rebuild.
template <typename Index>
void save_to(const std::filesystem::path& dir, const char* name, const Index& index,
             const std::string& hash) {
  std::filesystem::create_directories(dir);
  index.save(dir / name, hash);
}

}  // namespace

RetrieverSet build_retrievers(const EvalConfig& config, const Dataset& dataset,
                              const Providers& providers) {
  RetrieverSet rs;
  const auto kinds = effective_retrievers(config, providers);
  const std::string hash = corpus_hash(dataset.corpus_docs);
  auto cached = [&](const char* name) -> std::optional<std::filesystem::path> {
    if (!config.index_dir) return std::nullopt;
    auto path = *config.index_dir / name;
    if (!std::filesystem::exists(path)) return std::nullopt;
    return path;
  };
  if (kinds.contains(RetrieverKind::kBm25)) {
    if (auto path = cached(kBm25IndexFile)) {
      rs.bm25 = try_load<Bm25Index>([&] { return Bm25Index::load(*path, hash); });
    }
    if (!rs.bm25) {
      rs.bm25 = std::make_shared<const Bm25Index>(Bm25Index::build(dataset.corpus_docs));
      if (config.index_dir) save_to(*config.index_dir, kBm25IndexFile, *rs.bm25, hash);
    }
    rs.active.push_back(rs.bm25.get());
  }
  if (kinds.contains(RetrieverKind::kDense) || kinds.contains(RetrieverKind::kRerank)) {
    if (auto path = cached(kDenseIndexFile)) {
      rs.dense = try_load<DenseIndex>(
          [&] { return DenseIndex::load(*path, hash, providers.embedding); });
    }
    if (!rs.dense) {
      rs.dense = std::make_shared<const DenseIndex>(
          DenseIndex::build(dataset.corpus_docs, providers.embedding, config.token_budget));
      if (config.index_dir) save_to(*config.index_dir, kDenseIndexFile, *rs.dense, hash);
    }
    if (kinds.contains(RetrieverKind::kDense)) rs.active.push_back(rs.dense.get());
  }
  if (kinds.contains(RetrieverKind::kRerank)) {
    rs.rerank = std::make_shared<const RerankRetriever>(rs.dense, providers.reranker,
                                                        dataset.corpus_docs, config.token_budget);
    rs.active.push_back(rs.rerank.get());
  }
  return rs;
}

std::vector<std::filesystem::path> write_indexes(const EvalConfig& config, const Dataset& dataset,
                                                 const Providers& providers,
                                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string hash = corpus_hash(dataset.corpus_docs);
  std::vector<std::filesystem::path> written;
  Bm25Index::build(dataset.corpus_docs).save(dir / kBm25IndexFile, hash);
  written.push_back(dir / kBm25IndexFile);
  if (providers.embedding) {
    DenseIndex::build(dataset.corpus_docs, providers.embedding, config.token_budget)
        .save(dir / kDenseIndexFile, hash);
    written.push_back(dir / kDenseIndexFile);
  }
  return written;
}

DimensionReport run_eval(const EvalConfig& config) {
  return run_eval(config, make_providers(config));
}

DimensionReport run_eval(const EvalConfig& config, const Providers& providers) {
  validate(config, providers);
  Dataset dataset = [&] {
    try {
      return load_dataset(config.instances_path, config.corpus_path);
    } catch (const Error& e) {
      throw Error(e.code(), "stage 'load': " + e.message());
    }
  }();
  if (config.dedupe) {
    for (auto& inst : dataset.instances) inst.predictions = dedupe_predictions(inst.predictions);
  }
  RetrieverSet retrievers;
  if (wants(config, Dimension::kUtility)) {
    try {
      retrievers = build_retrievers(config, dataset, providers);
    } catch (const Error& e) {
      throw Error(e.code(), "stage 'index': " + e.message());
    }
  }

  const size_t n = dataset.instances.size();
  std::vector<DocumentOutcome> outcomes(n);
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(std::min(config.workers, std::max<size_t>(n, 1)));
  auto work = [&](size_t worker) {
    try {
      for (size_t i = next++; i < n; i = next++) {
        outcomes[i] = evaluate_document(dataset.instances[i], config, providers, retrievers);
      }
    } catch (...) {
      errors[worker] = std::current_exception();
      next = n;
    }
  };
  if (errors.size() <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < errors.size(); ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::sort(outcomes.begin(), outcomes.end(),
            [](const DocumentOutcome& a, const DocumentOutcome& b) {
              return a.record.id < b.record.id;
            });
  DimensionReport report;
  for (auto& o : outcomes) {
    report.per_document.push_back(std::move(o.record));
    for (auto& s : o.skips) report.skips.push_back(std::move(s));
  }
  aggregate(report);

  auto& md = report.metadata;
  md.config_hash = config_hash(config);
  md.toolkit_version = std::string(kToolkitVersion);
  if (providers.embedding) md.providers["embedding"] = providers.embedding->identity();
  if (providers.scorer) md.providers["score"] = providers.scorer->identity();
  if (providers.reranker) md.providers["rerank"] = providers.reranker->identity();
  md.timestamp = resolve_timestamp(config);
  md.system_name = config.system_name;
  md.k = config.k;
  md.base = config.base;
  md.alpha = config.alpha;
  return report;
}

void aggregate(DimensionReport& report) {
  std::map<std::string, double> sums;
  report.defined_counts.clear();
  for (const auto& doc : report.per_document) {
    for (const auto& [name, value] : doc.metrics) {
      sums[name] += value;
      ++report.defined_counts[name];
    }
  }
  report.aggregate.clear();
  for (const auto& [name, sum] : sums) {
    report.aggregate[name] = sum / static_cast<double>(report.defined_counts[name]);
  }
}

std::vector<std::string> summary_columns(size_t k, size_t base) {
  return {"#KP",          "SemP", "SemR",    "SemF1",
          "SemCov",       "Naturalness",     "Faithfulness",
          "dup",          "emb_sim",         "RR@" + std::to_string(k),
          "Spare_" + std::to_string(base) + "@" + std::to_string(k)};
}

std::string render_machine_report(const DimensionReport& report) {
  std::string out = metadata_json(report.metadata).dump() + "\n";
  for (const auto& doc : report.per_document) {
    out += json{{"type", "document"}, {"id", doc.id}, {"metrics", doc.metrics}, {"flags", doc.flags}}
               .dump();
    out += "\n";
  }
  for (const auto& s : report.skips) {
    out += json{{"type", "skip"}, {"id", s.id}, {"dimension", s.dimension}, {"reason", s.reason}}
               .dump();
    out += "\n";
  }
  out += json{{"type", "aggregate"},
              {"documents", report.per_document.size()},
              {"metrics", report.aggregate},
              {"counts", report.defined_counts}}
             .dump();
  out += "\n";
  return out;
}

std::string render_table(const DimensionReport& report) {
  const auto& md = report.metadata;
  static const std::vector<std::pair<const char*, int>> kSummary = {
      {"num_kp", 1},      {"sem_p", 3},        {"sem_r", 3},           {"sem_f1", 3},
      {"sem_cov", 3},     {"naturalness", 3},  {"faithfulness", 3},    {"dup_token_ratio", 3},
      {"emb_sim", 3},     {"rr_at_k", 3},      {"spare", 3}};
  auto cell = [&](const char* metric, int decimals) {
    auto it = report.aggregate.find(metric);
    return it == report.aggregate.end() ? std::string("-") : fmt_value(it->second, decimals);
  };
  std::vector<std::string> header = {"System"};
  for (auto& c : summary_columns(md.k, md.base)) header.push_back(c);
  std::vector<std::string> row = {md.system_name};
  for (const auto& [metric, decimals] : kSummary) row.push_back(cell(metric, decimals));

  std::string out = "Documents: " + std::to_string(report.per_document.size()) + "\n\n";
  out += render_rows(header, {row});

  static const std::vector<std::pair<const char*, const char*>> kLexical = {
      {"exact_p", "Exact P"},        {"exact_r", "Exact R"},         {"exact_f1", "Exact F1"},
      {"substring_p", "Substr P"},   {"substring_r", "Substr R"},    {"substring_f1", "Substr F1"},
      {"r_precision", "R-prec"},     {"rouge_l_p", "RougeL P"},      {"rouge_l_r", "RougeL R"},
      {"rouge_l_f1", "RougeL F1"}};
  if (report.aggregate.contains("exact_f1")) {
    std::vector<std::string> lex_header = {"System"};
    std::vector<std::string> lex_row = {md.system_name};
    for (const auto& [metric, label] : kLexical) {
      lex_header.emplace_back(label);
      lex_row.push_back(cell(metric, 3));
    }
    out += "\n" + render_rows(lex_header, {lex_row});
  }
  if (!report.skips.empty()) {
    out += "\nSkipped: " + std::to_string(report.skips.size()) + " (see report.jsonl)\n";
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(const DimensionReport& report,
                                               const std::filesystem::path& dir,
                                               const std::set<ReportFormat>& formats) {
  if (report.per_document.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "refusing to write a report with no documents");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  if (formats.contains(ReportFormat::kMachine)) {
    written.push_back(dir / "report.jsonl");
    write_file(written.back(), render_machine_report(report));
  }
  if (formats.contains(ReportFormat::kTable)) {
    written.push_back(dir / "report.txt");
    write_file(written.back(), render_table(report));
  }
  return written;
}

// ---- meta-evaluation ----

Dimension dimension_for_metric(std::string_view metric) {
  if (metric == "sem_p" || metric == "sem_r" || metric == "sem_f1") return Dimension::kSaliency;
  if (metric == "sem_cov") return Dimension::kCoverage;
  if (metric == "dup_token_ratio" || metric == "emb_sim") return Dimension::kDiversity;
  if (metric == "rr_at_k" || metric == "spare") return Dimension::kUtility;
  if (metric == "naturalness") return Dimension::kNaturalness;
  if (metric == "faithfulness") return Dimension::kFaithfulness;
  for (std::string_view lex : {"exact_p", "exact_r", "exact_f1", "substring_p", "substring_r",
                               "substring_f1", "r_precision", "rouge_l_p", "rouge_l_r",
                               "rouge_l_f1"}) {
    if (metric == lex) return Dimension::kLexical;
  }
  throw Error(ErrorCode::kConfig, "unknown metric '" + std::string(metric) + "'");
}

std::vector<MetaEvalRow> correlate_report(const DimensionReport& report,
                                          std::span<const HumanJudgment> judgments,
                                          const MetaEvalConfig& config) {
  std::set<std::string> known;
  for (const auto& doc : report.per_document) known.insert(doc.id);
  std::vector<MetaEvalRow> rows;
  for (const auto& target : config.targets) {
    std::map<std::string, double> values;
    for (const auto& doc : report.per_document) {
      auto it = doc.metrics.find(target.metric);
      if (it != doc.metrics.end()) values.emplace(doc.id, it->second);
    }
    std::optional<std::string_view> system;
    if (config.system_id) system = *config.system_id;
    try {
      const PairedScores paired =
          pair_scores(values, judgments, target.human_dimension, known, system);
      rows.push_back({target, bootstrap_ci(paired, config.stat, config.bootstrap)});
    } catch (const Error& e) {
      throw Error(e.code(), "target " + target.metric + " vs " + target.human_dimension + ": " +
                                e.message());
    }
  }
  return rows;
}

std::vector<MetaEvalRow> run_meta_eval(const MetaEvalConfig& config) {
  return run_meta_eval(config, make_providers(config.eval));
}

std::vector<MetaEvalRow> run_meta_eval(const MetaEvalConfig& config, const Providers& providers) {
  if (config.targets.empty()) throw Error(ErrorCode::kConfig, "no metric targets given");
  MetaEvalConfig cfg = config;
  cfg.eval.dimensions.clear();
  for (const auto& t : config.targets) cfg.eval.dimensions.insert(dimension_for_metric(t.metric));
  const auto judgments = load_human_judgments(config.judgments_path);
  const DimensionReport report = run_eval(cfg.eval, providers);
  return correlate_report(report, judgments, cfg);
}

std::string render_meta_eval_jsonl(std::span<const MetaEvalRow> rows) {
  std::string out;
  for (const auto& row : rows) {
    const auto& r = row.result;
    json rec = {{"metric", row.target.metric},
                {"dimension", row.target.human_dimension},
                {"n", r.n},
                {"pearson_r", r.pearson_r},
                {"spearman_rho", r.spearman_rho},
                {"kendall_tau", r.kendall_tau},
                {"ci_stat", std::string(to_string(r.stat))},
                {"ci_low", r.ci_low ? json(*r.ci_low) : json(nullptr)},
                {"ci_high", r.ci_high ? json(*r.ci_high) : json(nullptr)},
                {"level", r.level},
                {"n_resamples", r.n_resamples},
                {"n_degenerate", r.n_degenerate},
                {"method", r.method}};
    out += rec.dump() + "\n";
  }
  return out;
}

std::string render_meta_eval_table(std::span<const MetaEvalRow> rows) {
  std::vector<std::string> header = {"Metric", "Human", "n", "r", "rho", "tau", "CI"};
  std::vector<std::vector<std::string>> body;
  for (const auto& row : rows) {
    const auto& r = row.result;
    std::string ci = "-";
    if (r.ci_low && r.ci_high) {
      ci = std::string(to_string(r.stat)) + " [" + fmt_value(*r.ci_low, 3) + ", " +
           fmt_value(*r.ci_high, 3) + "]";
    }
    body.push_back({row.target.metric, row.target.human_dimension, std::to_string(r.n),
                    fmt_value(r.pearson_r, 3), fmt_value(r.spearman_rho, 3),
                    fmt_value(r.kendall_tau, 3), ci});
  }
  return render_rows(header, body);
}

}  // namespace kpeval
