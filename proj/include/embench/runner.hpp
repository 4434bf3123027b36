#pragma once
// Benchmark orchestration: run configs, per-dataset result files as the unit
// of resumption, two-level macro aggregation (datasets -> task, tasks ->
// overall), and leaderboard rendering with cost and latency columns.
// Rounding to two decimals (half away from zero, x100 scale) happens exactly
// once, at render time.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "embench/backend.hpp"
#include "embench/evaluators.hpp"

namespace embench {

struct RunConfig {
    std::vector<BackendSpec> backends;
    std::vector<std::string> manifests;  // paths or globs
    uint64_t seed = 42;
    std::string output_dir;
    std::vector<std::string> report_formats = {"json", "markdown"};
    // key: dataset id, or "task:<task_name>"
    std::map<std::string, std::string> instruction_overrides;
    bool bitext_both_directions = false;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir);

// Instruction for one dataset: dataset override > task override > manifest
// instruction > shipped default. {Lang} resolves to target_language, falling
// back to the dataset language for monolingual datasets.
std::optional<std::string> resolve_instruction(
    const DatasetManifest& manifest,
    const std::map<std::string, std::string>& overrides);

// "*" wildcards in the filename component; plain paths pass through.
// Expansion is sorted for deterministic run order.
std::vector<std::string> expand_manifest_globs(const std::vector<std::string>& patterns);

struct DatasetEntry {
    std::string backend;
    std::string dataset_id;
    std::string task_label;  // empty for failures before load
    std::string language;
    std::optional<std::string> target_language;
    std::string metric;
    MetricValue main_score;
    std::map<std::string, double> auxiliary;
    uint64_t seed = 0;
    UsageLedger ledger;
    double wall_clock_s = 0.0;
    std::optional<std::string> error;

    bool failed() const { return error.has_value(); }
};

struct CostLatency {
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    double mean_ms = 0.0;
    double cost_estimate = 0.0;
    uint64_t tokens_estimated = 0;
    uint64_t requests = 0;
    uint64_t texts_embedded = 0;
};

struct BenchmarkReport {
    std::vector<DatasetEntry> per_dataset;  // successes, (backend, dataset) order
    std::map<std::string, std::map<std::string, double>> per_task;  // backend -> label -> mean
    std::map<std::string, double> overall;                          // backend -> mean of task means
    std::map<std::string, CostLatency> cost_latency;
    std::vector<DatasetEntry> failures;
};

struct Aggregates {
    std::map<std::string, double> per_task;  // task label -> unweighted mean
    double overall = 0.0;                    // unweighted mean of task means
};

// Two-level macro average over one backend's results, natural scale.
Aggregates aggregate(const std::vector<EvalResult>& results);

// x100, two decimals, half away from zero. The one rounding site.
double render_round(double natural_value);

// format: "markdown" | "md" | "json". Byte-stable given an input report.
std::string render_report(const BenchmarkReport& report, const std::string& format);

// Parses a report.json back (round-trip check and the `report` subcommand).
BenchmarkReport load_report_json(const std::string& text);

struct RunOutcome {
    BenchmarkReport report;
    size_t failed_datasets = 0;
};

// Evaluates every (backend, manifest) pair, resuming from per-dataset result
// files already present under output_dir/results. Writes the report files
// named by report_formats. Failing datasets become error entries and the
// outcome counts them.
RunOutcome run_benchmark(const RunConfig& config);

// Rebuilds a report purely from the result files under run_dir/results.
BenchmarkReport report_from_run_dir(const std::string& run_dir);

} // namespace embench
