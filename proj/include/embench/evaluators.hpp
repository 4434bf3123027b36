#pragma once
// One evaluator per task kind. Each embeds through the backend contract,
// scores with the exact metric implementations, and reduces in dataset order
// so results are bitwise stable across concurrency settings. Instructions are
// applied to the query side only; documents are always embedded raw.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "embench/backend.hpp"
#include "embench/metrics.hpp"
#include "embench/model.hpp"

namespace embench {

struct EvalResult {
    std::string dataset_id;
    TaskKind task = TaskKind::Retrieval;
    MetricValue main_score;
    std::map<std::string, double> auxiliary;
    UsageLedger ledger_delta;
    uint64_t seed = 0;
    double wall_clock_s = 0.0;
    std::string language;
    std::optional<std::string> target_language;
};

struct EvalOptions {
    uint64_t seed = 42;
    bool bitext_both_directions = false;
};

EvalResult eval_retrieval(const RetrievalData& data, Embedder& backend,
                          const std::optional<std::string>& instruction);

// Identical machinery to eval_retrieval; the {Lang} substitution happened at
// instruction-resolution time and the result carries the language pair.
EvalResult eval_crosslingual_retrieval(const RetrievalData& data, Embedder& backend,
                                       const std::optional<std::string>& instruction);

EvalResult eval_reranking(const RerankingData& data, Embedder& backend,
                          const std::optional<std::string>& instruction);

EvalResult eval_sts(const StsData& data, Embedder& backend,
                    const std::optional<std::string>& instruction);

EvalResult eval_classification(const ClassificationData& data, Embedder& backend,
                               const std::optional<std::string>& instruction);

EvalResult eval_pair_classification(const PairClassificationData& data, Embedder& backend,
                                    const std::optional<std::string>& instruction);

EvalResult eval_clustering(const ClusteringData& data, Embedder& backend,
                           const std::optional<std::string>& instruction, uint64_t seed);

EvalResult eval_bitext(const BitextData& data, Embedder& backend,
                       const std::optional<std::string>& instruction,
                       bool both_directions = false);

// Dispatches on the manifest's task, stamps identity, seed, the ledger delta
// and wall clock, and verifies main_score.name matches the manifest metric.
EvalResult evaluate_dataset(const DatasetManifest& manifest, const TaskData& data,
                            Embedder& backend, const std::optional<std::string>& instruction,
                            const EvalOptions& options);

} // namespace embench
