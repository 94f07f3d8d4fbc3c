#include "kpeval/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "kpeval/error.hpp"

namespace kpeval {
namespace {

using json = nlohmann::json;

[[noreturn]] void parse_fail(std::string_view source, size_t line,
                             const std::string& what) {
  throw Error(ErrorCode::kParseError, std::string(source) + ":" +
                                          std::to_string(line) + ": " + what);
}

const json& require_field(const json& rec, std::string_view name,
                          std::string_view source, size_t line) {
  auto it = rec.find(name);
  if (it == rec.end()) {
    parse_fail(source, line, "missing field '" + std::string(name) + "'");
  }
  return *it;
}

std::string require_string(const json& rec, std::string_view name,
                           std::string_view source, size_t line) {
  const json& v = require_field(rec, name, source, line);
  if (!v.is_string()) {
    parse_fail(source, line, "field '" + std::string(name) + "' must be a string");
  }
  return v.get<std::string>();
}

std::vector<Phrase> read_phrases(const json& rec, std::string_view name,
                                 std::string_view source, size_t line) {
  const json& v = require_field(rec, name, source, line);
  try {
    if (v.is_string()) return parse_phrase_list(v.get<std::string>());
    if (v.is_array()) {
      std::vector<Phrase> out;
      for (const auto& item : v) {
        if (!item.is_string()) {
          parse_fail(source, line,
                     "field '" + std::string(name) + "' holds a non-string");
        }
        auto parsed = parse_phrase_list(item.get<std::string>());
        if (parsed.size() != 1) {
          parse_fail(source, line,
                     "field '" + std::string(name) + "' items must be single non-blank phrases");
        }
        out.push_back(std::move(parsed.front()));
      }
      return out;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyPhrase) throw;
    parse_fail(source, line, "field '" + std::string(name) + "': " + e.message());
  }
  parse_fail(source, line,
             "field '" + std::string(name) + "' must be a string or array");
}

// Calls fn(record, line_number) for every non-blank line.
template <typename Fn>
void for_each_record(std::string_view content, std::string_view source, Fn fn) {
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    const std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (rec.is_discarded() || !rec.is_object()) {
      parse_fail(source, line_no, "not a JSON object");
    }
    fn(rec, line_no);
  }
}

}  // namespace

const EvalInstance* Dataset::find(std::string_view id) const {
  for (const auto& inst : instances) {
    if (inst.id == id) return &inst;
  }
  return nullptr;
}

bool operator==(const EvalInstance& a, const EvalInstance& b) {
  return a.id == b.id && a.title == b.title && a.body == b.body &&
         a.references == b.references && a.predictions == b.predictions;
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.instances == b.instances && a.corpus_docs == b.corpus_docs;
}

Dataset parse_dataset(std::string_view instances_jsonl,
                      std::optional<std::string_view> corpus_jsonl,
                      std::string_view source) {
  Dataset ds;
  std::unordered_set<std::string> ids;
  for_each_record(instances_jsonl, source, [&](const json& rec, size_t line) {
    EvalInstance inst;
    inst.id = require_string(rec, "id", source, line);
    inst.title = require_string(rec, "title", source, line);
    inst.body = rec.contains("abstract") ? require_string(rec, "abstract", source, line)
                                         : require_string(rec, "body", source, line);
    inst.references = read_phrases(rec, "references", source, line);
    inst.predictions = read_phrases(rec, "predictions", source, line);
    if (!ids.insert(inst.id).second) {
      throw Error(ErrorCode::kDuplicateId, std::string(source) + ":" +
                                               std::to_string(line) +
                                               ": duplicate id '" + inst.id + "'");
    }
    ds.instances.push_back(std::move(inst));
  });

  if (!corpus_jsonl) {
    for (const auto& inst : ds.instances) {
      ds.corpus_docs.push_back({inst.id, inst.text()});
    }
    return ds;
  }

  const std::string corpus_source = std::string(source) + " (corpus)";
  std::unordered_set<std::string> corpus_ids;
  for_each_record(*corpus_jsonl, corpus_source, [&](const json& rec, size_t line) {
    CorpusDoc doc{require_string(rec, "id", corpus_source, line),
                  require_string(rec, "text", corpus_source, line)};
    if (!corpus_ids.insert(doc.id).second) {
      throw Error(ErrorCode::kDuplicateId, corpus_source + ":" +
                                               std::to_string(line) +
                                               ": duplicate id '" + doc.id + "'");
    }
    ds.corpus_docs.push_back(std::move(doc));
  });
  for (const auto& inst : ds.instances) {
    if (!corpus_ids.contains(inst.id)) {
      throw Error(ErrorCode::kMissingDoc,
                  "instance '" + inst.id + "' is not in the corpus file");
    }
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& instances_path,
                     const std::optional<std::filesystem::path>& corpus_path) {
  const std::string instances = read_file(instances_path);
  if (!corpus_path) return parse_dataset(instances, std::nullopt, instances_path.string());
  const std::string corpus = read_file(*corpus_path);
  return parse_dataset(instances, std::string_view(corpus), instances_path.string());
}

std::string serialize_instances(const Dataset& dataset) {
  std::string out;
  for (const auto& inst : dataset.instances) {
    json rec = {{"id", inst.id},
                {"title", inst.title},
                {"abstract", inst.body},
                {"references", join_raw(inst.references, " ; ")},
                {"predictions", join_raw(inst.predictions, " ; ")}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_corpus(const Dataset& dataset) {
  std::string out;
  for (const auto& doc : dataset.corpus_docs) {
    out += json{{"id", doc.id}, {"text", doc.text}}.dump();
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& dataset,
                  const std::filesystem::path& instances_path,
                  const std::optional<std::filesystem::path>& corpus_path) {
  write_file(instances_path, serialize_instances(dataset));
  if (corpus_path) write_file(*corpus_path, serialize_corpus(dataset));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace kpeval
