#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kpeval/phrase.hpp"

namespace kpeval {

// One document X with its references Y and the system's ranked predictions P.
struct EvalInstance {
  std::string id;
  std::string title;
  std::string body;
  std::vector<Phrase> references;
  // System rank order; never re-sorted.
  std::vector<Phrase> predictions;

  // title + " " + body
  std::string text() const { return title + " " + body; }
};

struct CorpusDoc {
  std::string id;
  std::string text;

  friend bool operator==(const CorpusDoc&, const CorpusDoc&) = default;
};

// Instances plus the retrieval corpus C. Every instance id appears exactly
// once in corpus_docs.
struct Dataset {
  std::vector<EvalInstance> instances;
  std::vector<CorpusDoc> corpus_docs;

  const EvalInstance* find(std::string_view id) const;
};

bool operator==(const EvalInstance& a, const EvalInstance& b);
bool operator==(const Dataset& a, const Dataset& b);

// Reads line-delimited JSON records with fields id, title, abstract (or
// body), references and predictions. Phrase lists are ";"-separated strings
// or JSON string arrays. Without a corpus file the corpus is built from the
// instances themselves. Throws Error(kParseError) with the line number,
// Error(kDuplicateId), or Error(kMissingDoc) for an instance absent from an
// explicit corpus.
Dataset load_dataset(const std::filesystem::path& instances_path,
                     const std::optional<std::filesystem::path>& corpus_path =
                         std::nullopt);

// Parses already-read content; `source` is used in error messages.
Dataset parse_dataset(std::string_view instances_jsonl,
                      std::optional<std::string_view> corpus_jsonl,
                      std::string_view source = "<memory>");

void save_dataset(const Dataset& dataset,
                  const std::filesystem::path& instances_path,
                  const std::optional<std::filesystem::path>& corpus_path);

std::string serialize_instances(const Dataset& dataset);
std::string serialize_corpus(const Dataset& dataset);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace kpeval
