#include "embench/loaders.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace embench {

namespace {

json parse_line(const std::string& line, const std::string& path, size_t lineno) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
}

std::string get_str(const json& obj, const char* key, const std::string& path, size_t lineno) {
    if (!obj.contains(key) || !obj.at(key).is_string())
        throw ParseError(path + ":" + std::to_string(lineno) + ": missing string field \"" +
                         key + "\"");
    return obj.at(key).get<std::string>();
}

void log_count(const std::string& dataset, const std::string& what, size_t n) {
    std::cerr << "[load] " << dataset << ": " << n << " " << what << "\n";
}

template <typename T>
void require_nonempty(const std::vector<T>& v, const std::string& what,
                      const DatasetManifest& m) {
    if (v.empty()) throw EmptyDataset("dataset \"" + m.id + "\" has no " + what);
}

void require_unique_ids(const std::vector<std::pair<std::string, std::string>>& entries,
                        const std::string& what, const std::string& path) {
    std::unordered_set<std::string> seen;
    for (const auto& [id, text] : entries) {
        if (!seen.insert(id).second)
            throw ValidationError("duplicate " + what + " id \"" + id + "\" in " + path);
    }
}

} // namespace

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<CorpusEntry> load_corpus_jsonl(const std::string& path) {
    std::vector<CorpusEntry> out;
    size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        json obj = parse_line(line, path, lineno);
        out.push_back({get_str(obj, "id", path, lineno), get_str(obj, "text", path, lineno)});
    }
    return out;
}

Qrels load_qrels_tsv(const std::string& path) {
    Qrels qrels;
    size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        size_t t1 = line.find('\t');
        size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected query_id<TAB>doc_id<TAB>relevance");
        std::string qid = line.substr(0, t1);
        std::string did = line.substr(t1 + 1, t2 - t1 - 1);
        int rel;
        try {
            size_t used = 0;
            rel = std::stoi(line.substr(t2 + 1), &used);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": relevance is not an integer");
        }
        if (rel < 0)
            throw ParseError(path + ":" + std::to_string(lineno) + ": relevance must be >= 0");
        qrels.entries[{qid, did}] = rel;
    }
    return qrels;
}

namespace {

RetrievalData load_retrieval(const DatasetManifest& m) {
    RetrievalData data;
    for (const auto& e : load_corpus_jsonl(m.paths.at("corpus")))
        data.documents.emplace_back(e.id, e.text);
    const std::string& qpath = m.paths.at("queries");
    size_t lineno = 0;
    for (const auto& line : read_lines(qpath)) {
        ++lineno;
        if (line.empty()) continue;
        json obj = parse_line(line, qpath, lineno);
        data.queries.emplace_back(get_str(obj, "id", qpath, lineno),
                                  get_str(obj, "text", qpath, lineno));
    }
    data.qrels = load_qrels_tsv(m.paths.at("qrels"));

    require_nonempty(data.documents, "documents", m);
    require_nonempty(data.queries, "queries", m);
    require_unique_ids(data.documents, "document", m.paths.at("corpus"));
    require_unique_ids(data.queries, "query", qpath);

    std::unordered_set<std::string> doc_ids, query_ids;
    for (const auto& [id, _] : data.documents) doc_ids.insert(id);
    for (const auto& [id, _] : data.queries) query_ids.insert(id);
    std::set<std::string> judged_queries;
    for (const auto& [key, rel] : data.qrels.entries) {
        if (!query_ids.count(key.first)) throw DanglingReference(key.first);
        if (!doc_ids.count(key.second)) throw DanglingReference(key.second);
        judged_queries.insert(key.first);
    }
    for (const auto& q : judged_queries) {
        if (!data.qrels.has_positive(q))
            throw ValidationError("query \"" + q + "\" has judgments but no positive one");
    }

    log_count(m.id, "documents", data.documents.size());
    log_count(m.id, "queries", data.queries.size());
    log_count(m.id, "qrels entries", data.qrels.entries.size());
    return data;
}

RerankingData load_reranking(const DatasetManifest& m) {
    RerankingData data;
    const std::string& path = m.paths.at("records");
    size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        json obj = parse_line(line, path, lineno);
        RerankingItem item;
        item.query = get_str(obj, "query", path, lineno);
        if (!obj.contains("positive") || !obj["positive"].is_array() ||
            !obj.contains("negative") || !obj["negative"].is_array())
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected \"positive\" and \"negative\" arrays");
        for (const auto& p : obj["positive"]) item.positives.push_back(p.get<std::string>());
        for (const auto& n : obj["negative"]) item.negatives.push_back(n.get<std::string>());
        if (item.positives.empty() && item.negatives.empty())
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": reranking item has zero candidates");
        if (item.negatives.empty())
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": reranking item has no negatives");
        data.items.push_back(std::move(item));
    }
    require_nonempty(data.items, "reranking items", m);
    log_count(m.id, "reranking items", data.items.size());
    return data;
}

StsData load_sts(const DatasetManifest& m) {
    StsData data;
    data.score_range = m.score_range;
    const std::string& path = m.paths.at("pairs");
    size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        json obj = parse_line(line, path, lineno);
        StsPair pair;
        pair.text1 = get_str(obj, "text1", path, lineno);
        pair.text2 = get_str(obj, "text2", path, lineno);
        if (!obj.contains("score") || !obj["score"].is_number())
            throw ParseError(path + ":" + std::to_string(lineno) + ": missing numeric \"score\"");
        pair.gold_score = obj["score"].get<double>();
        if (pair.gold_score < data.score_range.first || pair.gold_score > data.score_range.second)
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": gold score outside declared range");
        data.pairs.push_back(std::move(pair));
    }
    require_nonempty(data.pairs, "sts pairs", m);
    log_count(m.id, "sts pairs", data.pairs.size());
    return data;
}

std::vector<std::pair<std::string, std::string>> load_labeled(const std::string& path) {
    std::vector<std::pair<std::string, std::string>> out;
    size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        json obj = parse_line(line, path, lineno);
        out.emplace_back(get_str(obj, "text", path, lineno), get_str(obj, "label", path, lineno));
    }
    return out;
}

ClassificationData load_classification(const DatasetManifest& m) {
    ClassificationData data;
    data.train = load_labeled(m.paths.at("train"));
    data.test = load_labeled(m.paths.at("test"));
    require_nonempty(data.train, "train examples", m);
    require_nonempty(data.test, "test examples", m);

    std::set<std::string> train_labels;
    for (const auto& [_, label] : data.train) train_labels.insert(label);
    for (const auto& [_, label] : data.test) {
        if (!train_labels.count(label))
            throw ValidationError("test label \"" + label + "\" never appears in train");
    }
    log_count(m.id, "train examples", data.train.size());
    log_count(m.id, "test examples", data.test.size());
    return data;
}

PairClassificationData load_pair_classification(const DatasetManifest& m) {
    PairClassificationData data;
    const std::string& path = m.paths.at("pairs");
    size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        json obj = parse_line(line, path, lineno);
        PairClassificationData::Pair pair;
        pair.text1 = get_str(obj, "text1", path, lineno);
        pair.text2 = get_str(obj, "text2", path, lineno);
        if (!obj.contains("label") || !obj["label"].is_number_integer())
            throw ParseError(path + ":" + std::to_string(lineno) + ": missing integer \"label\"");
        pair.label = obj["label"].get<int>();
        if (pair.label != 0 && pair.label != 1)
            throw ValidationError(path + ":" + std::to_string(lineno) + ": label must be 0 or 1");
        data.pairs.push_back(std::move(pair));
    }
    require_nonempty(data.pairs, "pairs", m);
    log_count(m.id, "pairs", data.pairs.size());
    return data;
}

ClusteringData load_clustering(const DatasetManifest& m) {
    ClusteringData data;
    const std::string& path = m.paths.at("records");
    size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        json obj = parse_line(line, path, lineno);
        data.items.emplace_back(get_str(obj, "text", path, lineno),
                                get_str(obj, "label", path, lineno));
    }
    require_nonempty(data.items, "clustering items", m);
    log_count(m.id, "clustering items", data.items.size());
    return data;
}

BitextData load_bitext(const DatasetManifest& m) {
    BitextData data;
    const std::string& path = m.paths.at("pairs");
    size_t lineno = 0;
    for (const auto& line : read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        json obj = parse_line(line, path, lineno);
        data.pairs.emplace_back(get_str(obj, "source", path, lineno),
                                get_str(obj, "target", path, lineno));
    }
    require_nonempty(data.pairs, "bitext pairs", m);
    log_count(m.id, "bitext pairs", data.pairs.size());
    return data;
}

} // namespace

TaskData load_task_data(const DatasetManifest& manifest) {
    switch (manifest.task) {
        case TaskKind::Retrieval:
        case TaskKind::CrosslingualRetrieval: return load_retrieval(manifest);
        case TaskKind::Reranking: return load_reranking(manifest);
        case TaskKind::STS: return load_sts(manifest);
        case TaskKind::Classification: return load_classification(manifest);
        case TaskKind::PairClassification: return load_pair_classification(manifest);
        case TaskKind::Clustering: return load_clustering(manifest);
        case TaskKind::BitextMining: return load_bitext(manifest);
    }
    throw ValidationError("unreachable task kind");
}

} // namespace embench
