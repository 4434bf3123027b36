#include "embench/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "embench/loaders.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace embench {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
    }
    fs::rename(tmp, path);
}

BackendSpec backend_from_json(const json& doc) {
    BackendSpec spec;
    spec.id = doc.at("id").get<std::string>();
    spec.kind = doc.value("kind", std::string("remote"));
    if (doc.contains("endpoint")) spec.endpoint = doc.at("endpoint").get<std::string>();
    spec.model_name = doc.value("model_name", spec.id);
    spec.dim = doc.at("dim").get<size_t>();
    spec.max_batch = doc.value("max_batch", size_t{64});
    spec.max_concurrency = doc.value("max_concurrency", size_t{4});
    if (doc.contains("retry")) {
        spec.retry.max_attempts = doc["retry"].value("max_attempts", 4);
        spec.retry.base_backoff_ms = doc["retry"].value("base_backoff_ms", 250);
    }
    spec.price_per_million_tokens = doc.value("price_per_million_tokens", 0.0);
    if (doc.contains("vectors_path")) spec.vectors_path = doc.at("vectors_path").get<std::string>();
    if (doc.contains("cache_path")) spec.cache_path = doc.at("cache_path").get<std::string>();
    spec.adapter = doc.value("adapter", std::string("generic"));
    if (doc.contains("api_key_env")) spec.api_key_env = doc.at("api_key_env").get<std::string>();
    spec.seed = doc.value("seed", uint64_t{42});
    return spec;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("run config is not valid JSON: ") + e.what());
    }
    RunConfig config;
    try {
        for (const auto& b : doc.at("backends")) config.backends.push_back(backend_from_json(b));
        for (const auto& m : doc.at("manifests"))
            config.manifests.push_back(m.get<std::string>());
        config.seed = doc.value("seed", uint64_t{42});
        config.output_dir = doc.at("output_dir").get<std::string>();
        if (doc.contains("report_formats")) {
            config.report_formats.clear();
            for (const auto& f : doc["report_formats"])
                config.report_formats.push_back(f.get<std::string>());
        }
        if (doc.contains("instruction_overrides"))
            for (auto& [key, value] : doc["instruction_overrides"].items())
                config.instruction_overrides[key] = value.get<std::string>();
        config.bitext_both_directions = doc.value("bitext_both_directions", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("run config field error: ") + e.what());
    }

    if (config.backends.empty()) throw ConfigError("run config needs at least one backend");
    if (config.manifests.empty()) throw ConfigError("run config needs at least one manifest");
    for (const auto& f : config.report_formats)
        if (f != "json" && f != "markdown")
            throw ConfigError("unknown report format \"" + f + "\"");
    for (auto& spec : config.backends) spec.validate();

    if (!base_dir.empty()) {
        auto rebase = [&](std::string& p) {
            if (!p.empty() && fs::path(p).is_relative()) p = (fs::path(base_dir) / p).string();
        };
        for (auto& m : config.manifests) rebase(m);
        rebase(config.output_dir);
        for (auto& spec : config.backends) {
            if (spec.vectors_path) rebase(*spec.vectors_path);
            if (spec.cache_path) rebase(*spec.cache_path);
        }
    }
    return config;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(slurp(path), fs::path(path).parent_path().string());
}

namespace {

bool wildcard_match(const std::string& pattern, const std::string& name) {
    size_t p = 0, n = 0, star = std::string::npos, mark = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = n;
        } else if (star != std::string::npos) {
            p = star + 1;
            n = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

} // namespace

std::vector<std::string> expand_manifest_globs(const std::vector<std::string>& patterns) {
    std::vector<std::string> out;
    for (const auto& pattern : patterns) {
        if (pattern.find('*') == std::string::npos) {
            out.push_back(pattern);
            continue;
        }
        fs::path p(pattern);
        fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
        std::string name = p.filename().string();
        std::vector<std::string> matches;
        if (fs::exists(dir))
            for (const auto& entry : fs::directory_iterator(dir))
                if (entry.is_regular_file() &&
                    wildcard_match(name, entry.path().filename().string()))
                    matches.push_back(entry.path().string());
        std::sort(matches.begin(), matches.end());
        out.insert(out.end(), matches.begin(), matches.end());
    }
    return out;
}

std::optional<std::string> resolve_instruction(
    const DatasetManifest& manifest, const std::map<std::string, std::string>& overrides) {
    std::string text;
    if (auto it = overrides.find(manifest.id); it != overrides.end()) {
        text = it->second;
    } else if (auto it2 = overrides.find("task:" + task_name(manifest.task));
               it2 != overrides.end()) {
        text = it2->second;
    } else if (manifest.instruction) {
        text = *manifest.instruction;
    } else {
        std::optional<std::string> lang = manifest.target_language;
        if (!lang && instruction_needs_language(manifest.task)) lang = manifest.language;
        return default_instruction(manifest.task, lang);
    }
    std::string lang = manifest.target_language.value_or(manifest.language);
    size_t pos = 0;
    while ((pos = text.find("{Lang}", pos)) != std::string::npos) {
        text.replace(pos, 6, lang);
        pos += lang.size();
    }
    return text;
}

double render_round(double natural_value) {
    double scaled = natural_value * 100.0;
    double magnitude = std::floor(std::abs(scaled) * 100.0 + 0.5) / 100.0;
    return std::copysign(magnitude, scaled);
}

Aggregates aggregate(const std::vector<EvalResult>& results) {
    std::map<std::string, std::pair<double, size_t>> sums;  // label -> (sum, count)
    for (const auto& r : results) {
        auto& [sum, count] = sums[task_label(r.task)];
        sum += r.main_score.value;
        count += 1;
    }
    Aggregates agg;
    double total = 0.0;
    for (const auto& [label, sc] : sums) {
        double mean = sc.first / static_cast<double>(sc.second);
        agg.per_task[label] = mean;
        total += mean;
    }
    agg.overall = sums.empty() ? 0.0 : total / static_cast<double>(sums.size());
    return agg;
}

// --- result files -------------------------------------------------------------

namespace {

json ledger_to_json(const UsageLedger& ledger) {
    json doc;
    doc["requests"] = ledger.requests;
    doc["texts_embedded"] = ledger.texts_embedded;
    doc["tokens_estimated"] = ledger.tokens_estimated;
    doc["cost_estimate"] = ledger.cost_estimate;
    doc["latencies_ms"] = ledger.latencies_ms;
    return doc;
}

UsageLedger ledger_from_json(const json& doc) {
    UsageLedger ledger;
    ledger.requests = doc.value("requests", uint64_t{0});
    ledger.texts_embedded = doc.value("texts_embedded", uint64_t{0});
    ledger.tokens_estimated = doc.value("tokens_estimated", uint64_t{0});
    ledger.cost_estimate = doc.value("cost_estimate", 0.0);
    if (doc.contains("latencies_ms"))
        ledger.latencies_ms = doc["latencies_ms"].get<std::vector<double>>();
    return ledger;
}

std::string entry_to_json(const DatasetEntry& entry) {
    json doc;
    doc["backend"] = entry.backend;
    doc["dataset_id"] = entry.dataset_id;
    if (entry.failed()) {
        doc["error"] = *entry.error;
        return doc.dump(2) + "\n";
    }
    doc["task"] = entry.task_label;
    doc["language"] = entry.language;
    if (entry.target_language) doc["target_language"] = *entry.target_language;
    doc["metric"] = entry.metric;
    doc["main_score"] = {{"name", entry.main_score.name}, {"value", entry.main_score.value}};
    doc["auxiliary"] = entry.auxiliary;
    doc["seed"] = entry.seed;
    doc["wall_clock_s"] = entry.wall_clock_s;
    doc["ledger"] = ledger_to_json(entry.ledger);
    return doc.dump(2) + "\n";
}

DatasetEntry entry_from_json(const std::string& text) {
    json doc = json::parse(text);
    DatasetEntry entry;
    entry.backend = doc.at("backend").get<std::string>();
    entry.dataset_id = doc.at("dataset_id").get<std::string>();
    if (doc.contains("error")) {
        entry.error = doc["error"].get<std::string>();
        return entry;
    }
    entry.task_label = doc.at("task").get<std::string>();
    entry.language = doc.value("language", "");
    if (doc.contains("target_language"))
        entry.target_language = doc["target_language"].get<std::string>();
    entry.metric = doc.value("metric", "");
    entry.main_score.name = doc.at("main_score").at("name").get<std::string>();
    entry.main_score.value = doc.at("main_score").at("value").get<double>();
    if (doc.contains("auxiliary"))
        for (auto& [key, value] : doc["auxiliary"].items())
            entry.auxiliary[key] = value.get<double>();
    entry.seed = doc.value("seed", uint64_t{0});
    entry.wall_clock_s = doc.value("wall_clock_s", 0.0);
    if (doc.contains("ledger")) entry.ledger = ledger_from_json(doc["ledger"]);
    return entry;
}

DatasetEntry entry_from_result(const EvalResult& result, const std::string& backend_id,
                               const std::string& metric) {
    DatasetEntry entry;
    entry.backend = backend_id;
    entry.dataset_id = result.dataset_id;
    entry.task_label = task_label(result.task);
    entry.language = result.language;
    entry.target_language = result.target_language;
    entry.metric = metric;
    entry.main_score = result.main_score;
    entry.auxiliary = result.auxiliary;
    entry.seed = result.seed;
    entry.wall_clock_s = result.wall_clock_s;
    entry.ledger = result.ledger_delta;
    return entry;
}

} // namespace

// --- report ---------------------------------------------------------------------

namespace {

BenchmarkReport build_report(std::vector<DatasetEntry> entries) {
    std::sort(entries.begin(), entries.end(), [](const DatasetEntry& a, const DatasetEntry& b) {
        if (a.backend != b.backend) return a.backend < b.backend;
        return a.dataset_id < b.dataset_id;
    });

    BenchmarkReport report;
    std::map<std::string, std::map<std::string, std::pair<double, size_t>>> sums;
    std::map<std::string, UsageLedger> usage;
    for (auto& entry : entries) {
        if (entry.failed()) {
            report.failures.push_back(std::move(entry));
            continue;
        }
        auto& [sum, count] = sums[entry.backend][entry.task_label];
        sum += entry.main_score.value;
        count += 1;
        auto& ledger = usage[entry.backend];
        ledger.requests += entry.ledger.requests;
        ledger.texts_embedded += entry.ledger.texts_embedded;
        ledger.tokens_estimated += entry.ledger.tokens_estimated;
        ledger.cost_estimate += entry.ledger.cost_estimate;
        ledger.latencies_ms.insert(ledger.latencies_ms.end(), entry.ledger.latencies_ms.begin(),
                                   entry.ledger.latencies_ms.end());
        report.per_dataset.push_back(std::move(entry));
    }
    for (const auto& [backend, by_task] : sums) {
        double total = 0.0;
        for (const auto& [label, sc] : by_task) {
            double mean = sc.first / static_cast<double>(sc.second);
            report.per_task[backend][label] = mean;
            total += mean;
        }
        report.overall[backend] = total / static_cast<double>(by_task.size());
    }
    for (const auto& [backend, ledger] : usage) {
        LedgerSummary s = ledger_summary(ledger);
        CostLatency cl;
        cl.p50_ms = s.p50_ms;
        cl.p95_ms = s.p95_ms;
        cl.mean_ms = s.mean_ms;
        cl.cost_estimate = s.cost_estimate;
        cl.tokens_estimated = s.tokens_estimated;
        cl.requests = ledger.requests;
        cl.texts_embedded = ledger.texts_embedded;
        report.cost_latency[backend] = cl;
    }
    return report;
}

json report_to_json(const BenchmarkReport& report) {
    json doc;
    doc["per_dataset"] = json::array();
    for (const auto& entry : report.per_dataset) {
        json e;
        e["backend"] = entry.backend;
        e["dataset_id"] = entry.dataset_id;
        e["task"] = entry.task_label;
        e["language"] = entry.language;
        if (entry.target_language) e["target_language"] = *entry.target_language;
        e["metric"] = entry.metric;
        e["main_score"] = {{"name", entry.main_score.name}, {"value", entry.main_score.value}};
        e["auxiliary"] = entry.auxiliary;
        e["seed"] = entry.seed;
        json ledger;
        ledger["requests"] = entry.ledger.requests;
        ledger["texts_embedded"] = entry.ledger.texts_embedded;
        ledger["tokens_estimated"] = entry.ledger.tokens_estimated;
        ledger["cost_estimate"] = entry.ledger.cost_estimate;
        e["usage"] = ledger;
        doc["per_dataset"].push_back(e);
    }
    doc["per_task"] = report.per_task;
    doc["overall"] = report.overall;
    doc["cost_latency"] = json::object();
    for (const auto& [backend, cl] : report.cost_latency) {
        doc["cost_latency"][backend] = {
            {"p50_ms", cl.p50_ms},
            {"p95_ms", cl.p95_ms},
            {"mean_ms", cl.mean_ms},
            {"cost_estimate", cl.cost_estimate},
            {"tokens_estimated", cl.tokens_estimated},
            {"requests", cl.requests},
            {"texts_embedded", cl.texts_embedded},
        };
    }
    doc["failures"] = json::array();
    for (const auto& f : report.failures)
        doc["failures"].push_back(
            {{"backend", f.backend}, {"dataset_id", f.dataset_id}, {"error", *f.error}});
    return doc;
}

std::string format_2dp(double rounded) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", rounded);
    return buf;
}

std::string render_markdown(const BenchmarkReport& report) {
    static const char* kColumns[] = {"RTR", "CRTR", "RRK", "STS", "CLF",
                                     "PairCLF", "CLR", "BTM"};
    std::string out;
    out += "| Backend |";
    for (const char* c : kColumns) out += std::string(" ") + c + " |";
    out += " Avg | Cost | p50 ms |\n";
    out += "|---|";
    for (size_t i = 0; i < 8; ++i) out += "---|";
    out += "---|---|---|\n";

    std::vector<std::string> backends;
    for (const auto& [backend, _] : report.overall) backends.push_back(backend);
    std::sort(backends.begin(), backends.end(), [&](const std::string& a, const std::string& b) {
        double oa = report.overall.at(a), ob = report.overall.at(b);
        if (oa != ob) return oa > ob;
        return a < b;
    });

    for (const auto& backend : backends) {
        out += "| " + backend + " |";
        const auto& by_task = report.per_task.at(backend);
        for (const char* c : kColumns) {
            auto it = by_task.find(c);
            out += " ";
            out += it == by_task.end() ? "-" : format_2dp(render_round(it->second));
            out += " |";
        }
        out += " " + format_2dp(render_round(report.overall.at(backend))) + " |";
        const auto& cl = report.cost_latency.at(backend);
        char cost[64], p50[64];
        std::snprintf(cost, sizeof cost, "%.2f", cl.cost_estimate);
        std::snprintf(p50, sizeof p50, "%.1f", cl.p50_ms);
        out += std::string(" ") + cost + " | " + p50 + " |\n";
    }

    if (!report.failures.empty()) {
        out += "\nFailed datasets:\n";
        for (const auto& f : report.failures)
            out += "- " + f.backend + "/" + f.dataset_id + ": failed (" + *f.error + ")\n";
    }
    return out;
}

} // namespace

std::string render_report(const BenchmarkReport& report, const std::string& format) {
    if (format == "json") return report_to_json(report).dump(2) + "\n";
    if (format == "markdown" || format == "md") return render_markdown(report);
    throw UnknownFormat("unknown report format \"" + format + "\"");
}

BenchmarkReport load_report_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("report is not valid JSON: ") + e.what());
    }
    BenchmarkReport report;
    for (const auto& e : doc.at("per_dataset")) {
        DatasetEntry entry;
        entry.backend = e.at("backend").get<std::string>();
        entry.dataset_id = e.at("dataset_id").get<std::string>();
        entry.task_label = e.at("task").get<std::string>();
        entry.language = e.value("language", "");
        if (e.contains("target_language"))
            entry.target_language = e["target_language"].get<std::string>();
        entry.metric = e.value("metric", "");
        entry.main_score.name = e.at("main_score").at("name").get<std::string>();
        entry.main_score.value = e.at("main_score").at("value").get<double>();
        if (e.contains("auxiliary"))
            for (auto& [key, value] : e["auxiliary"].items())
                entry.auxiliary[key] = value.get<double>();
        entry.seed = e.value("seed", uint64_t{0});
        if (e.contains("usage")) entry.ledger = ledger_from_json(e["usage"]);
        report.per_dataset.push_back(std::move(entry));
    }
    for (auto& [backend, by_task] : doc.at("per_task").items())
        for (auto& [label, value] : by_task.items())
            report.per_task[backend][label] = value.get<double>();
    for (auto& [backend, value] : doc.at("overall").items())
        report.overall[backend] = value.get<double>();
    for (auto& [backend, cl] : doc.at("cost_latency").items()) {
        CostLatency c;
        c.p50_ms = cl.value("p50_ms", 0.0);
        c.p95_ms = cl.value("p95_ms", 0.0);
        c.mean_ms = cl.value("mean_ms", 0.0);
        c.cost_estimate = cl.value("cost_estimate", 0.0);
        c.tokens_estimated = cl.value("tokens_estimated", uint64_t{0});
        c.requests = cl.value("requests", uint64_t{0});
        c.texts_embedded = cl.value("texts_embedded", uint64_t{0});
        report.cost_latency[backend] = c;
    }
    if (doc.contains("failures"))
        for (const auto& f : doc["failures"]) {
            DatasetEntry entry;
            entry.backend = f.at("backend").get<std::string>();
            entry.dataset_id = f.at("dataset_id").get<std::string>();
            entry.error = f.at("error").get<std::string>();
            report.failures.push_back(std::move(entry));
        }
    return report;
}

// --- execution -------------------------------------------------------------------

namespace {

fs::path result_path(const std::string& output_dir, const std::string& backend_id,
                     const std::string& dataset_id) {
    return fs::path(output_dir) / "results" / backend_id / (dataset_id + ".json");
}

std::string dataset_id_of(const std::string& manifest_path) {
    try {
        return load_manifest(manifest_path).id;
    } catch (const Error&) {
        return fs::path(manifest_path).stem().string();
    }
}

} // namespace

RunOutcome run_benchmark(const RunConfig& config) {
    if (config.backends.empty() || config.manifests.empty())
        throw ConfigError("run config needs at least one backend and one manifest");

    std::vector<std::string> manifest_paths = expand_manifest_globs(config.manifests);
    if (manifest_paths.empty()) throw ConfigError("manifest globs matched no files");

    std::vector<DatasetEntry> entries;
    size_t failed = 0;

    for (const auto& spec : config.backends) {
        Embedder embedder(spec);
        for (const auto& path : manifest_paths) {
            std::string dataset_id = dataset_id_of(path);
            fs::path rfile = result_path(config.output_dir, spec.id, dataset_id);
            if (!fs::exists(rfile)) {
                DatasetEntry entry;
                entry.backend = spec.id;
                entry.dataset_id = dataset_id;
                try {
                    DatasetManifest manifest = load_manifest(path);
                    TaskData data = load_task_data(manifest);
                    auto instruction =
                        resolve_instruction(manifest, config.instruction_overrides);
                    EvalOptions options;
                    options.seed = config.seed;
                    options.bitext_both_directions = config.bitext_both_directions;
                    EvalResult result =
                        evaluate_dataset(manifest, data, embedder, instruction, options);
                    entry = entry_from_result(result, spec.id, manifest.metric);
                } catch (const std::exception& e) {
                    entry.error = e.what();
                    std::cerr << "[eval] " << spec.id << "/" << dataset_id
                              << " failed: " << e.what() << "\n";
                }
                spit(rfile, entry_to_json(entry));
            }
            DatasetEntry loaded = entry_from_json(slurp(rfile.string()));
            if (loaded.failed()) ++failed;
            entries.push_back(std::move(loaded));
        }
    }

    RunOutcome outcome;
    outcome.report = build_report(std::move(entries));
    outcome.failed_datasets = failed;

    for (const auto& format : config.report_formats) {
        std::string name = format == "json" ? "report.json" : "report.md";
        spit(fs::path(config.output_dir) / name, render_report(outcome.report, format));
    }
    return outcome;
}

BenchmarkReport report_from_run_dir(const std::string& run_dir) {
    fs::path results = fs::path(run_dir) / "results";
    if (!fs::exists(results)) throw ConfigError("no results directory under " + run_dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(results))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    std::vector<DatasetEntry> entries;
    for (const auto& f : files) entries.push_back(entry_from_json(slurp(f)));
    return build_report(std::move(entries));
}

} // namespace embench
