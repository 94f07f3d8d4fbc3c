#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kpeval/error.hpp"
#include "kpeval/meta_eval.hpp"
#include "kpeval/pipeline.hpp"

namespace {

using namespace kpeval;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RetrieverKind parse_retriever(std::string_view name) {
  for (RetrieverKind r : {RetrieverKind::kBm25, RetrieverKind::kDense, RetrieverKind::kRerank}) {
    if (to_string(r) == name) return r;
  }
  throw Error(ErrorCode::kConfig, "unknown retriever '" + std::string(name) + "'");
}

// Raw flag values; turned into an EvalConfig after parsing.
struct EvalFlags {
  std::string instances;
  std::string corpus;
  std::string dimensions = "all";
  std::string system = "system";
  double alpha = 0.0;
  size_t k = 5;
  size_t base = 5;
  std::string retrievers = "bm25,dense";
  size_t token_budget = 512;
  bool dedupe = false;
  std::string embeddings;
  std::string embed_url;
  std::string score_url;
  std::string rerank_url;
  bool stub_scorer = false;
  std::string index_dir;
  std::string output_dir = ".";
  size_t workers = 1;
  std::string timestamp;
};

void add_input_flags(CLI::App* app, EvalFlags& f) {
  app->add_option("--instances", f.instances, "Instances file (JSONL)")->required();
  app->add_option("--corpus", f.corpus, "Retrieval corpus (JSONL); defaults to the instances");
}

void add_provider_flags(CLI::App* app, EvalFlags& f) {
  app->add_option("--embeddings", f.embeddings, "Phrase embedding table (JSONL)");
  app->add_option("--embed-url", f.embed_url, "Sidecar base URL for /embed")
      ->envname("KPEVAL_EMBED_URL");
  app->add_option("--score-url", f.score_url, "Sidecar base URL for /score")
      ->envname("KPEVAL_SCORE_URL");
  app->add_option("--rerank-url", f.rerank_url, "Sidecar base URL for /rerank")
      ->envname("KPEVAL_RERANK_URL");
  app->add_flag("--stub-scorer", f.stub_scorer, "Deterministic offline quality scorer");
  app->add_option("--token-budget", f.token_budget, "Document truncation in whitespace tokens")
      ->capture_default_str();
}

void add_eval_flags(CLI::App* app, EvalFlags& f) {
  add_input_flags(app, f);
  add_provider_flags(app, f);
  app->add_option("--dimensions", f.dimensions,
                  "Comma list of naturalness,faithfulness,saliency,coverage,diversity,utility,"
                  "lexical or 'all'")
      ->capture_default_str();
  app->add_option("--system", f.system, "System name for the report")->capture_default_str();
  app->add_option("--alpha", f.alpha, "Similarity threshold")->capture_default_str();
  app->add_option("-k,--k", f.k, "Retrieval cutoff")->capture_default_str();
  app->add_option("--base", f.base, "Spare prefix base")->capture_default_str();
  app->add_option("--retrievers", f.retrievers, "Comma list of bm25,dense,rerank")
      ->capture_default_str();
  app->add_flag("--dedupe", f.dedupe, "Drop repeated predictions (by stem) before scoring");
  app->add_option("--index-dir", f.index_dir, "Directory with prebuilt indexes");
  app->add_option("-o,--output-dir", f.output_dir, "Where reports are written")
      ->capture_default_str();
  app->add_option("-j,--workers", f.workers, "Worker threads")->capture_default_str();
  app->add_option("--timestamp", f.timestamp, "Fixed report timestamp (ISO-8601)");
}

template <typename T>
std::optional<T> opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return T(s);
}

EvalConfig to_config(const EvalFlags& f) {
  EvalConfig c;
  c.instances_path = f.instances;
  c.corpus_path = opt<std::filesystem::path>(f.corpus);
  if (f.dimensions == "all") {
    c.dimensions = all_dimensions();
  } else {
    c.dimensions.clear();
    for (const auto& d : split_list(f.dimensions)) {
      if (d == "all") {
        auto all = all_dimensions();
        c.dimensions.insert(all.begin(), all.end());
      } else {
        c.dimensions.insert(parse_dimension(d));
      }
    }
  }
  c.system_name = f.system;
  c.alpha = f.alpha;
  c.k = f.k;
  c.base = f.base;
  c.retrievers.clear();
  for (const auto& r : split_list(f.retrievers)) c.retrievers.insert(parse_retriever(r));
  c.token_budget = f.token_budget;
  c.dedupe = f.dedupe;
  c.embeddings_file = opt<std::filesystem::path>(f.embeddings);
  c.embed_url = opt<std::string>(f.embed_url);
  c.score_url = opt<std::string>(f.score_url);
  c.rerank_url = opt<std::string>(f.rerank_url);
  c.stub_scorer = f.stub_scorer;
  c.index_dir = opt<std::filesystem::path>(f.index_dir);
  c.output_dir = f.output_dir;
  c.workers = f.workers;
  c.timestamp = opt<std::string>(f.timestamp);
  return c;
}

std::set<ReportFormat> parse_formats(const std::string& s) {
  std::set<ReportFormat> out;
  for (const auto& f : split_list(s)) {
    if (f == "machine" || f == "jsonl") {
      out.insert(ReportFormat::kMachine);
    } else if (f == "table" || f == "txt") {
      out.insert(ReportFormat::kTable);
    } else {
      throw Error(ErrorCode::kConfig, "unknown report format '" + f + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::kConfig, "no report format given");
  return out;
}

int cmd_eval(const EvalFlags& f, const std::string& formats, bool quiet) {
  const EvalConfig config = to_config(f);
  const auto fmts = parse_formats(formats);
  const DimensionReport report = run_eval(config);
  for (const auto& s : report.skips) {
    std::cerr << "skip: " << s.id << " " << s.dimension << " (" << s.reason << ")\n";
  }
  for (const auto& path : emit_report(report, config.output_dir, fmts)) {
    std::cerr << "wrote " << path.string() << "\n";
  }
  if (!quiet && fmts.contains(ReportFormat::kTable)) std::cout << render_table(report);
  return 0;
}

MetricTarget parse_target(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size()) {
    throw Error(ErrorCode::kConfig, "target must look like metric:dimension, got '" + s + "'");
  }
  MetricTarget t{s.substr(0, colon), s.substr(colon + 1)};
  dimension_for_metric(t.metric);
  return t;
}

struct MetaFlags {
  std::string judgments;
  std::vector<std::string> targets;
  std::string system_id;
  std::string stat = "kendall";
  size_t resamples = 1000;
  double level = 0.95;
  uint64_t seed = 0;
  size_t threads = 1;
};

int cmd_meta_eval(const EvalFlags& f, const MetaFlags& m, bool quiet) {
  MetaEvalConfig config;
  config.eval = to_config(f);
  config.judgments_path = m.judgments;
  for (const auto& t : m.targets) config.targets.push_back(parse_target(t));
  config.system_id = opt<std::string>(m.system_id);
  config.stat = parse_correlation_stat(m.stat);
  config.bootstrap = {m.resamples, m.level, m.seed, m.threads};
  const auto rows = run_meta_eval(config);
  std::error_code ec;
  std::filesystem::create_directories(config.eval.output_dir, ec);
  const auto jsonl = config.eval.output_dir / "meta_eval.jsonl";
  const auto txt = config.eval.output_dir / "meta_eval.txt";
  write_file(jsonl, render_meta_eval_jsonl(rows));
  write_file(txt, render_meta_eval_table(rows));
  std::cerr << "wrote " << jsonl.string() << "\nwrote " << txt.string() << "\n";
  if (!quiet) std::cout << render_meta_eval_table(rows);
  return 0;
}

int cmd_index(const EvalFlags& f, const std::string& dir) {
  EvalConfig config = to_config(f);
  const Providers providers = make_providers(config);
  const Dataset dataset = load_dataset(config.instances_path, config.corpus_path);
  for (const auto& path : write_indexes(config, dataset, providers, dir)) {
    std::cerr << "wrote " << path.string() << "\n";
  }
  return 0;
}

struct DiagFlags {
  std::string pairs;
  std::string phrases;
  size_t n_pairs = 50000;
  uint64_t seed = 0;
  std::string output;
};

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::vector<std::string> out;
  std::stringstream ss(read_file(path));
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) out.push_back(line);
  }
  return out;
}

int cmd_diag(const EvalFlags& f, const DiagFlags& d) {
  EvalConfig config;
  config.embeddings_file = opt<std::filesystem::path>(f.embeddings);
  config.embed_url = opt<std::string>(f.embed_url);
  const Providers providers = make_providers(config);
  if (!providers.embedding) {
    throw Error(ErrorCode::kConfig, "diag needs an embedding provider (--embeddings or --embed-url)");
  }
  std::vector<std::string> phrases;
  if (!d.phrases.empty()) {
    phrases = read_lines(d.phrases);
  } else if (!f.instances.empty()) {
    const Dataset ds = load_dataset(f.instances, std::nullopt);
    for (const auto& inst : ds.instances) {
      for (const auto& p : inst.references) phrases.push_back(p.raw());
      for (const auto& p : inst.predictions) phrases.push_back(p.raw());
    }
  } else {
    throw Error(ErrorCode::kConfig, "diag needs --phrases or --instances for uniformity");
  }
  const auto pairs = load_variation_pairs(d.pairs);
  EmbeddingDiagnostics diag;
  diag.alignment = alignment(pairs, *providers.embedding);
  diag.uniformity = uniformity(phrases, *providers.embedding, d.n_pairs, d.seed);
  const nlohmann::json out = {{"alignment", diag.alignment},
                              {"uniformity", diag.uniformity},
                              {"delta", diag.delta()},
                              {"n_variation_pairs", pairs.size()},
                              {"n_random_pairs", d.n_pairs},
                              {"seed", d.seed},
                              {"provider", providers.embedding->identity()}};
  if (!d.output.empty()) write_file(d.output, out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyphrase evaluation toolkit"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Do not print tables to stdout");

  EvalFlags eval_flags;
  std::string formats = "machine,table";
  auto* eval = app.add_subcommand("eval", "Score a system's keyphrases");
  add_eval_flags(eval, eval_flags);
  eval->add_option("--format", formats, "Comma list of machine,table")->capture_default_str();

  EvalFlags meta_eval_flags;
  MetaFlags meta;
  auto* meta_eval = app.add_subcommand("meta-eval", "Correlate metrics with human judgments");
  add_eval_flags(meta_eval, meta_eval_flags);
  meta_eval->add_option("--judgments", meta.judgments, "Human judgments (JSONL)")->required();
  meta_eval->add_option("--target", meta.targets, "metric:dimension pair, repeatable")
      ->required();
  meta_eval->add_option("--system-id", meta.system_id, "Restrict judgments to one system");
  meta_eval->add_option("--stat", meta.stat, "Interval statistic: pearson, spearman, kendall")
      ->capture_default_str();
  meta_eval->add_option("--resamples", meta.resamples, "Bootstrap resamples")
      ->capture_default_str();
  meta_eval->add_option("--level", meta.level, "Interval level")->capture_default_str();
  meta_eval->add_option("--seed", meta.seed, "Bootstrap seed")->capture_default_str();
  meta_eval->add_option("--threads", meta.threads, "Bootstrap threads")->capture_default_str();

  EvalFlags index_flags;
  std::string index_dir;
  auto* index = app.add_subcommand("index", "Prebuild retrieval indexes");
  add_input_flags(index, index_flags);
  add_provider_flags(index, index_flags);
  index->add_option("--index-dir", index_dir, "Output directory")->required();

  EvalFlags diag_flags;
  DiagFlags diag;
  auto* diag_cmd = app.add_subcommand("diag", "Embedding alignment and uniformity");
  diag_cmd->add_option("--pairs", diag.pairs, "Name-variation pairs (JSONL)")->required();
  diag_cmd->add_option("--phrases", diag.phrases, "Phrase list, one per line");
  diag_cmd->add_option("--instances", diag_flags.instances, "Take phrases from a dataset");
  diag_cmd->add_option("--embeddings", diag_flags.embeddings, "Phrase embedding table (JSONL)");
  diag_cmd->add_option("--embed-url", diag_flags.embed_url, "Sidecar base URL for /embed")
      ->envname("KPEVAL_EMBED_URL");
  diag_cmd->add_option("--n-pairs", diag.n_pairs, "Random pairs for uniformity")
      ->capture_default_str();
  diag_cmd->add_option("--seed", diag.seed, "Sampling seed")->capture_default_str();
  diag_cmd->add_option("--output", diag.output, "Also write the JSON result here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval) return cmd_eval(eval_flags, formats, quiet);
    if (*meta_eval) return cmd_meta_eval(meta_eval_flags, meta, quiet);
    if (*index) return cmd_index(index_flags, index_dir);
    if (*diag_cmd) return cmd_diag(diag_flags, diag);
  } catch (const kpeval::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
