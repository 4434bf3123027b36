#include "embench/model.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace embench {

EmbeddingVector EmbeddingVector::of(std::vector<float> values) {
    if (values.empty()) throw ValidationError("embedding vector must have dim >= 1");
    double sumsq = 0.0;
    for (float v : values) {
        if (!std::isfinite(v)) throw NaNVector("embedding vector contains a non-finite value");
        sumsq += static_cast<double>(v) * static_cast<double>(v);
    }
    EmbeddingVector out;
    out.values = std::move(values);
    out.norm = std::sqrt(sumsq);
    return out;
}

std::string task_name(TaskKind task) {
    switch (task) {
        case TaskKind::Retrieval: return "retrieval";
        case TaskKind::CrosslingualRetrieval: return "crosslingual_retrieval";
        case TaskKind::Reranking: return "reranking";
        case TaskKind::STS: return "sts";
        case TaskKind::Classification: return "classification";
        case TaskKind::PairClassification: return "pair_classification";
        case TaskKind::Clustering: return "clustering";
        case TaskKind::BitextMining: return "bitext_mining";
    }
    throw ValidationError("unreachable task kind");
}

std::string task_label(TaskKind task) {
    switch (task) {
        case TaskKind::Retrieval: return "RTR";
        case TaskKind::CrosslingualRetrieval: return "CRTR";
        case TaskKind::Reranking: return "RRK";
        case TaskKind::STS: return "STS";
        case TaskKind::Classification: return "CLF";
        case TaskKind::PairClassification: return "PairCLF";
        case TaskKind::Clustering: return "CLR";
        case TaskKind::BitextMining: return "BTM";
    }
    throw ValidationError("unreachable task kind");
}

TaskKind parse_task(const std::string& name) {
    for (TaskKind t : kAllTasks) {
        if (task_name(t) == name) return t;
    }
    // Tolerate the short labels as aliases.
    for (TaskKind t : kAllTasks) {
        if (task_label(t) == name) return t;
    }
    throw ValidationError("unknown task kind: \"" + name + "\"");
}

std::string default_metric(TaskKind task) {
    switch (task) {
        case TaskKind::Retrieval:
        case TaskKind::CrosslingualRetrieval: return "ndcg@10";
        case TaskKind::Reranking: return "map";
        case TaskKind::STS: return "spearman";
        case TaskKind::Classification:
        case TaskKind::PairClassification: return "ap";
        case TaskKind::Clustering: return "v_measure";
        case TaskKind::BitextMining: return "f1";
    }
    throw ValidationError("unreachable task kind");
}

namespace {

std::string instruction_template(TaskKind task) {
    switch (task) {
        case TaskKind::Retrieval:
            return "Given an Arabic search query, retrieve web passages that answer the "
                   "question. Query:{query}.";
        case TaskKind::CrosslingualRetrieval:
        case TaskKind::Reranking:
            return "Given an Arabic search query, retrieve web passages that answer the "
                   "question in {Lang}. Query:{query}.";
        case TaskKind::STS:
            return "Retrieve semantically similar text. Text: {text}.";
        case TaskKind::PairClassification:
            return "Retrieve texts that are semantically similar to the given text. "
                   "Text: {text}.";
        case TaskKind::Clustering:
            return "Identify the topic or theme of the given news article. Article:{article}.";
        case TaskKind::Classification:
            return "Classify the text into the given categories {options}.";
        case TaskKind::BitextMining:
            return "Retrieve parallel sentences in {Lang}.";
    }
    throw ValidationError("unreachable task kind");
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

} // namespace

bool instruction_needs_language(TaskKind task) {
    return instruction_template(task).find("{Lang}") != std::string::npos;
}

std::string default_instruction(TaskKind task, const std::optional<std::string>& target_language) {
    std::string tpl = instruction_template(task);
    if (tpl.find("{Lang}") != std::string::npos) {
        if (!target_language || target_language->empty()) {
            throw MissingLanguage("instruction for task \"" + task_name(task) +
                                  "\" requires a target language");
        }
        replace_all(tpl, "{Lang}", *target_language);
    }
    return tpl;
}

// --- manifest ---------------------------------------------------------------

namespace {

const std::map<std::string, std::vector<std::string>>& required_roles() {
    static const std::map<std::string, std::vector<std::string>> roles = {
        {"retrieval", {"corpus", "queries", "qrels"}},
        {"crosslingual_retrieval", {"corpus", "queries", "qrels"}},
        {"reranking", {"records"}},
        {"sts", {"pairs"}},
        {"classification", {"train", "test"}},
        {"pair_classification", {"pairs"}},
        {"clustering", {"records"}},
        {"bitext_mining", {"pairs"}},
    };
    return roles;
}

DatasetManifest manifest_from_json(const json& doc, const std::string& base_dir) {
    if (!doc.is_object()) throw ParseError("manifest must be a JSON object");

    DatasetManifest m;
    try {
        m.id = doc.at("id").get<std::string>();
        m.task = parse_task(doc.at("task").get<std::string>());
        m.language = doc.at("language").get<std::string>();
        if (doc.contains("target_language"))
            m.target_language = doc.at("target_language").get<std::string>();
        if (doc.contains("dialect")) m.dialect = doc.at("dialect").get<std::string>();
        if (doc.contains("instruction")) m.instruction = doc.at("instruction").get<std::string>();
        if (doc.contains("metric_override")) m.metric_override = doc.at("metric_override").get<bool>();
        if (doc.contains("score_range")) {
            auto r = doc.at("score_range");
            m.score_range = {r.at(0).get<double>(), r.at(1).get<double>()};
        }
        for (auto& [role, path] : doc.at("paths").items()) {
            m.paths[role] = path.get<std::string>();
        }
        if (doc.contains("metric")) m.metric = doc.at("metric").get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest field error: ") + e.what());
    }

    if (m.id.empty()) throw ValidationError("manifest id must be nonempty");

    if (m.metric.empty()) {
        m.metric = default_metric(m.task);
    } else if (m.metric != default_metric(m.task) && !m.metric_override) {
        throw ValidationError("metric \"" + m.metric + "\" does not match task \"" +
                              task_name(m.task) + "\" (canonical: " + default_metric(m.task) +
                              "); set metric_override to force");
    }

    const bool needs_target =
        m.task == TaskKind::CrosslingualRetrieval || m.task == TaskKind::BitextMining;
    if (needs_target && (!m.target_language || m.target_language->empty())) {
        throw ValidationError("task \"" + task_name(m.task) + "\" requires target_language");
    }

    const auto& needed = required_roles().at(task_name(m.task));
    for (const auto& role : needed) {
        auto it = m.paths.find(role);
        if (it == m.paths.end())
            throw ValidationError("manifest \"" + m.id + "\" missing path role \"" + role + "\"");
        fs::path p(it->second);
        if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
        if (!fs::exists(p))
            throw ValidationError("manifest \"" + m.id + "\": path does not exist: " + p.string());
        it->second = p.string();
    }
    if (m.score_range.first >= m.score_range.second)
        throw ValidationError("score_range must be an increasing interval");
    return m;
}

} // namespace

DatasetManifest parse_manifest(const std::string& json_text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
    }
    return manifest_from_json(doc, base_dir);
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open manifest: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str(), fs::path(path).parent_path().string());
}

std::string DatasetManifest::to_json() const {
    json doc;
    doc["id"] = id;
    doc["task"] = task_name(task);
    doc["language"] = language;
    if (target_language) doc["target_language"] = *target_language;
    if (dialect) doc["dialect"] = *dialect;
    doc["paths"] = json::object();
    for (const auto& [role, path] : paths) doc["paths"][role] = path;
    doc["metric"] = metric;
    if (instruction) doc["instruction"] = *instruction;
    if (metric_override) doc["metric_override"] = true;
    if (task == TaskKind::STS) doc["score_range"] = {score_range.first, score_range.second};
    return doc.dump(2) + "\n";
}

bool Qrels::has_positive(const std::string& query_id) const {
    auto it = entries.lower_bound({query_id, ""});
    for (; it != entries.end() && it->first.first == query_id; ++it) {
        if (it->second >= 1) return true;
    }
    return false;
}

std::map<std::string, int> Qrels::for_query(const std::string& query_id) const {
    std::map<std::string, int> out;
    auto it = entries.lower_bound({query_id, ""});
    for (; it != entries.end() && it->first.first == query_id; ++it) {
        out[it->first.second] = it->second;
    }
    return out;
}

} // namespace embench
