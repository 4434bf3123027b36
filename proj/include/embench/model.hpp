#pragma once
// Domain types shared by the whole engine: embedding vectors, the eight task
// kinds, dataset manifests, relevance judgments, and the per-task in-memory
// dataset representations.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "embench/errors.hpp"

namespace embench {

// Fixed-dimension f32 vector with a cached f64 Euclidean norm. All similarity
// accumulation downstream happens in f64; storage stays f32.
struct EmbeddingVector {
    std::vector<float> values;
    double norm = 0.0;

    size_t dim() const { return values.size(); }

    // Validates finiteness and dim >= 1, computes the norm.
    static EmbeddingVector of(std::vector<float> values);
};

enum class TaskKind {
    Retrieval,
    CrosslingualRetrieval,
    Reranking,
    STS,
    Classification,
    PairClassification,
    Clustering,
    BitextMining,
};

inline constexpr TaskKind kAllTasks[] = {
    TaskKind::Retrieval,      TaskKind::CrosslingualRetrieval,
    TaskKind::Reranking,      TaskKind::STS,
    TaskKind::Classification, TaskKind::PairClassification,
    TaskKind::Clustering,     TaskKind::BitextMining,
};

// Canonical manifest spelling ("retrieval", "crosslingual_retrieval", ...).
std::string task_name(TaskKind task);
// Short leaderboard column label ("RTR", "CRTR", ...).
std::string task_label(TaskKind task);
TaskKind parse_task(const std::string& name);

// Canonical metric per task: ndcg@10, map, spearman, ap, v_measure, f1.
std::string default_metric(TaskKind task);

// The shipped per-task evaluation prompt. {Lang} is substituted with
// target_language when the template carries it; the text placeholders
// ({query}/{text}/{article}/{options}) are left untouched for the embed step.
// Throws MissingLanguage when the template needs {Lang} and none was given.
std::string default_instruction(TaskKind task,
                                const std::optional<std::string>& target_language = std::nullopt);

// True when the task's prompt template contains {Lang}.
bool instruction_needs_language(TaskKind task);

struct DatasetManifest {
    std::string id;
    TaskKind task = TaskKind::Retrieval;
    std::string language;                        // IETF-style tag, e.g. "ar"
    std::optional<std::string> target_language;  // required for CRTR and BTM
    std::optional<std::string> dialect;
    std::map<std::string, std::string> paths;    // role -> file path
    std::string metric;
    std::optional<std::string> instruction;      // override of the default prompt
    bool metric_override = false;                // allow a non-canonical metric
    std::pair<double, double> score_range{0.0, 5.0};  // STS gold-score range

    std::string to_json() const;
};

// Parses and validates a manifest file. Relative dataset paths are resolved
// against the manifest's own directory. Metric defaults from the task when
// absent; a non-canonical metric without metric_override is a ValidationError.
DatasetManifest load_manifest(const std::string& path);

// Same validation applied to an in-memory JSON document (used by tests and by
// the manifest round-trip property). base_dir resolves relative paths.
DatasetManifest parse_manifest(const std::string& json_text, const std::string& base_dir);

struct Qrels {
    // (query_id, doc_id) -> relevance grade. Invariant: every query id present
    // here has at least one entry with relevance >= 1.
    std::map<std::pair<std::string, std::string>, int> entries;

    bool has_positive(const std::string& query_id) const;
    // doc_id -> grade for one query.
    std::map<std::string, int> for_query(const std::string& query_id) const;
};

struct RetrievalData {
    std::vector<std::pair<std::string, std::string>> documents;  // (id, text)
    std::vector<std::pair<std::string, std::string>> queries;    // (id, text)
    Qrels qrels;
};

struct RerankingItem {
    std::string query;
    std::vector<std::string> positives;
    std::vector<std::string> negatives;
};
struct RerankingData {
    std::vector<RerankingItem> items;
};

struct StsPair {
    std::string text1;
    std::string text2;
    double gold_score = 0.0;
};
struct StsData {
    std::vector<StsPair> pairs;
    std::pair<double, double> score_range{0.0, 5.0};
};

struct ClassificationData {
    std::vector<std::pair<std::string, std::string>> train;  // (text, label)
    std::vector<std::pair<std::string, std::string>> test;
};

struct PairClassificationData {
    struct Pair {
        std::string text1;
        std::string text2;
        int label = 0;  // {0,1}
    };
    std::vector<Pair> pairs;
};

struct ClusteringData {
    std::vector<std::pair<std::string, std::string>> items;  // (text, gold label)
};

struct BitextData {
    std::vector<std::pair<std::string, std::string>> pairs;  // (source, target)
};

using TaskData = std::variant<RetrievalData, RerankingData, StsData, ClassificationData,
                              PairClassificationData, ClusteringData, BitextData>;

} // namespace embench
