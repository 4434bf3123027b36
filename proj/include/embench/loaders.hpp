#pragma once
// File loaders for the eight task-data formats (JSONL + TSV qrels). Loaders
// are pure given file contents; the returned TaskData preserves file order
// and is immutable afterwards.

#include <string>
#include <vector>

#include "embench/model.hpp"

namespace embench {

// Parses every file named in the manifest into the matching TaskData variant
// and enforces the dataset invariants (unique ids, qrels resolve, label
// closure, gold range, nonempty collections). One line to stderr per loaded
// collection.
TaskData load_task_data(const DatasetManifest& manifest);

// Low-level pieces, exposed for the CLI and tests.
struct CorpusEntry {
    std::string id;
    std::string text;
};
std::vector<CorpusEntry> load_corpus_jsonl(const std::string& path);
Qrels load_qrels_tsv(const std::string& path);

// Reads one JSON document per line; blank lines are skipped. ParseError
// carries file and line number.
std::vector<std::string> read_lines(const std::string& path);

} // namespace embench
