#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kpeval/diversity.hpp"
#include "kpeval/error.hpp"
#include "kpeval/meta_eval.hpp"
#include "kpeval/pipeline.hpp"
#include "kpeval/porter_stemmer.hpp"
#include "kpeval/ref_metrics.hpp"

namespace py = pybind11;
using namespace kpeval;

namespace {

using Table = std::map<std::string, std::vector<double>>;

std::vector<Phrase> to_phrases(const std::vector<std::string>& raws) {
  std::vector<Phrase> out;
  out.reserve(raws.size());
  for (const auto& r : raws) out.push_back(Phrase::from_text(r));
  return out;
}

std::unique_ptr<TableEmbeddingProvider> to_provider(const Table& table) {
  std::map<std::string, EmbeddingVector> m;
  for (const auto& [k, v] : table) m.emplace(k, EmbeddingVector(v));
  return std::make_unique<TableEmbeddingProvider>(std::move(m), "python");
}

py::tuple prf(const PRF& p) { return py::make_tuple(p.precision, p.recall, p.f1); }

std::set<Dimension> to_dimensions(const std::vector<std::string>& names) {
  std::set<Dimension> out;
  for (const auto& n : names) {
    if (n == "all") {
      auto all = all_dimensions();
      out.insert(all.begin(), all.end());
    } else {
      out.insert(parse_dimension(n));
    }
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Keyphrase evaluation metrics";
  m.attr("__version__") = std::string(kToolkitVersion);

  static py::exception<kpeval::Error> error(m, "KpevalError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const kpeval::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("porter_stem", [](const std::string& w) { return porter_stem(w); });
  m.def("normalize", [](const std::string& raw) {
    const Phrase p = Phrase::from_text(raw);
    py::dict d;
    d["raw"] = p.raw();
    d["tokens"] = p.tokens();
    d["stems"] = p.stems();
    d["stem_key"] = p.stem_key();
    return d;
  });
  m.def("parse_phrase_list", [](const std::string& text) { return raw_texts(parse_phrase_list(text)); });

  m.def("exact_match_prf", [](const std::vector<std::string>& p, const std::vector<std::string>& y) {
    return prf(exact_match_prf(to_phrases(p), to_phrases(y)));
  });
  m.def("substring_match_prf", [](const std::vector<std::string>& p, const std::vector<std::string>& y) {
    return prf(substring_match_prf(to_phrases(p), to_phrases(y)));
  });
  m.def("r_precision", [](const std::vector<std::string>& p, const std::vector<std::string>& y) {
    return r_precision(to_phrases(p), to_phrases(y));
  });
  m.def("rouge_l_prf", [](const std::vector<std::string>& p, const std::vector<std::string>& y) {
    return prf(rouge_l_prf(to_phrases(p), to_phrases(y)));
  });

  m.def("sem_prf_from_similarities",
        [](const std::vector<std::vector<double>>& rows, double alpha) {
          SimilarityMatrix sims(rows.size(), rows.empty() ? 0 : rows.front().size());
          for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != sims.cols()) {
              throw Error(ErrorCode::kInvalidArgument, "ragged similarity table");
            }
            for (size_t j = 0; j < sims.cols(); ++j) sims.at(i, j) = rows[i][j];
          }
          return prf(sem_prf_from_similarities(sims, alpha));
        },
        py::arg("similarities"), py::arg("alpha") = 0.0);
  m.def("sem_prf",
        [](const std::vector<std::string>& p, const std::vector<std::string>& y, const Table& table,
           double alpha) { return prf(sem_prf(to_phrases(p), to_phrases(y), *to_provider(table), alpha)); },
        py::arg("predictions"), py::arg("references"), py::arg("embeddings"), py::arg("alpha") = 0.0);
  m.def("sem_cov", [](const std::vector<std::string>& p, const std::vector<std::string>& y,
                      const Table& table) { return sem_cov(to_phrases(p), to_phrases(y), *to_provider(table)); });
  m.def("dup_token_ratio", [](const std::vector<std::string>& p) { return dup_token_ratio(to_phrases(p)); });
  m.def("emb_sim", [](const std::vector<std::string>& p, const Table& table) {
    return emb_sim(to_phrases(p), *to_provider(table));
  });

  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); });
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); });
  m.def("kendall_tau", [](const std::vector<double>& x, const std::vector<double>& y) { return kendall_tau(x, y); });
  m.def("bootstrap_ci",
        [](const std::vector<double>& metric, const std::vector<double>& human, const std::string& stat,
           size_t n_resamples, double level, uint64_t seed, size_t threads) {
          if (metric.size() != human.size()) throw Error(ErrorCode::kLengthMismatch, "length mismatch");
          std::vector<PairedItem> items;
          for (size_t i = 0; i < metric.size(); ++i) items.push_back({std::to_string(i), metric[i], human[i]});
          const auto r = bootstrap_ci(PairedScores(std::move(items)), parse_correlation_stat(stat),
                                      {n_resamples, level, seed, threads});
          py::dict d;
          d["pearson_r"] = r.pearson_r;
          d["spearman_rho"] = r.spearman_rho;
          d["kendall_tau"] = r.kendall_tau;
          d["n"] = r.n;
          d["ci_low"] = r.ci_low;
          d["ci_high"] = r.ci_high;
          d["n_degenerate"] = r.n_degenerate;
          return d;
        },
        py::arg("metric"), py::arg("human"), py::arg("stat") = "kendall", py::arg("n_resamples") = 1000,
        py::arg("level") = 0.95, py::arg("seed") = 0, py::arg("threads") = 1);

  m.def("run_eval",
        [](const std::filesystem::path& instances, std::optional<std::filesystem::path> embeddings,
           bool stub_scorer, const std::vector<std::string>& dimensions, size_t k, size_t base,
           double alpha, std::optional<std::string> timestamp, size_t workers) {
          EvalConfig c;
          c.instances_path = instances;
          c.embeddings_file = std::move(embeddings);
          c.stub_scorer = stub_scorer;
          c.dimensions = to_dimensions(dimensions);
          c.k = k;
          c.base = base;
          c.alpha = alpha;
          c.timestamp = std::move(timestamp);
          c.workers = workers;
          DimensionReport report;
          {
            py::gil_scoped_release release;
            report = run_eval(c);
          }
          return render_machine_report(report);
        },
        py::arg("instances"), py::arg("embeddings") = std::nullopt, py::arg("stub_scorer") = false,
        py::arg("dimensions") = std::vector<std::string>{"all"}, py::arg("k") = 5, py::arg("base") = 5,
        py::arg("alpha") = 0.0, py::arg("timestamp") = std::nullopt, py::arg("workers") = 1);
}
