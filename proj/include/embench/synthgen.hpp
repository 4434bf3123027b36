#pragma once
// Synthetic data pipelines: retrieval-triple generation against a chat
// backend with a resumable journal, corpus chunking for domain benchmarks,
// and multi-style evaluation-query generation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "embench/remote.hpp"

namespace embench {

struct SyntheticRecord {
    std::string task_description;
    std::string user_query;
    std::string positive;
    std::string hard_negative;
    std::string raw_response;
    bool valid = false;
    std::string reason;  // set when valid is false
};

// The triple-generation prompt with the task slot filled. Throws EmptyTask.
std::string build_generation_prompt(const std::string& task_description);

// Extracts the first JSON object from a model reply (code fences and leading
// prose tolerated) and validates the three keys. Never throws on malformed
// output; failures land in valid/reason.
SyntheticRecord parse_record(const std::string& raw, const std::string& task_description);

struct Chunk {
    std::string source_id;
    size_t index = 0;
    std::string text;
    uint64_t token_estimate = 0;
};

// Greedy split on sentence boundaries (., !, newline, the Arabic question
// mark, the Urdu full stop) packing up to max_tokens estimated tokens per
// chunk; a single over-long sentence is hard-split at the budget.
std::vector<Chunk> chunk_corpus(const std::string& doc_id, const std::string& text,
                                uint64_t max_tokens = 1024);

struct QueryGenResult {
    std::vector<std::pair<std::string, std::string>> queries;  // (query, chunk_id)
    bool short_list = false;  // model returned fewer than the requested styles
};

struct StyleConfig {
    std::vector<std::string> styles = {
        "a short keyword query", "a natural-language question", "a paraphrase of the main claim",
        "a long-form information need", "a colloquial phrasing"};
};

// One generation call asking for `styles` stylistically distinct queries
// answerable from the chunk; the reply must be a JSON array of strings.
// Exact duplicates after whitespace normalization are dropped. Throws
// GenerationFailed when the reply stays unparseable after retries.
QueryGenResult generate_eval_queries(ChatBackend& chat, const Chunk& chunk, size_t styles = 5,
                                     const StyleConfig& config = {}, int max_attempts = 3,
                                     double temperature = 0.7);

// Keeps valid records whose user_query survives Jaccard dedupe over the full
// query list at the given threshold.
std::vector<SyntheticRecord> filter_records(const std::vector<SyntheticRecord>& records,
                                            double threshold = 0.8);

// Resumable triple generation. The journal is an append-only JSONL of
// completed records; a rerun replays it and issues only the remaining calls.
// Returns all records (journaled + new).
std::vector<SyntheticRecord> generate_records(ChatBackend& chat,
                                              const std::string& task_description, size_t count,
                                              const std::string& journal_path,
                                              double temperature = 0.7);

std::string record_to_jsonl(const SyntheticRecord& record);
SyntheticRecord record_from_jsonl(const std::string& line);

} // namespace embench
