#include "embench/fixtures.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "embench/digest.hpp"
#include "embench/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace embench {

EmbeddingVector hash_embed(const std::string& text, size_t dim, uint64_t seed) {
    if (dim == 0) throw ValidationError("hash embedder needs dim >= 1");
    std::vector<float> values(dim, 0.0f);

    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!current.empty()) {
                tokens.push_back(current);
                current.clear();
            }
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) tokens.push_back(current);
    if (tokens.empty()) tokens.push_back("");

    for (const auto& tok : tokens) {
        uint64_t h = fnv1a64(tok, mix_seed(seed, 0x7069));
        // Scatter each token into four slots with signs drawn from the hash
        // stream; same token always lands identically.
        for (int slot = 0; slot < 4; ++slot) {
            h = mix_seed(h, static_cast<uint64_t>(slot) + 1);
            size_t idx = static_cast<size_t>(h % dim);
            float sign = (h >> 63) ? -1.0f : 1.0f;
            values[idx] += sign;
        }
    }

    double norm = 0.0;
    for (float v : values) norm += static_cast<double>(v) * static_cast<double>(v);
    if (norm == 0.0) {
        values[fnv1a64(text, seed) % dim] = 1.0f;
        norm = 1.0;
    }
    const float inv = static_cast<float>(1.0 / std::sqrt(norm));
    for (float& v : values) v *= inv;
    return EmbeddingVector::of(std::move(values));
}

namespace {

std::string pool_text(const std::string& prefix, size_t count) {
    std::string out;
    for (size_t j = 0; j < count; ++j) {
        if (!out.empty()) out += " ";
        out += prefix + std::to_string(j);
    }
    return out;
}

// count tokens drawn (with replacement) from an m-token pool.
std::string sampled_text(const std::string& prefix, size_t pool_size, size_t count, Rng& rng) {
    std::string out;
    for (size_t j = 0; j < count; ++j) {
        if (!out.empty()) out += " ";
        out += prefix + std::to_string(rng.bounded(pool_size));
    }
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string jsonl_corpus(const std::vector<std::pair<std::string, std::string>>& docs) {
    std::string out;
    for (const auto& [id, text] : docs) {
        json line;
        line["id"] = id;
        line["text"] = text;
        out += line.dump() + "\n";
    }
    return out;
}

std::string manifest_json(const std::string& id, TaskKind task,
                          const std::map<std::string, std::string>& paths,
                          const std::optional<std::string>& target_language = std::nullopt) {
    json doc;
    doc["id"] = id;
    doc["task"] = task_name(task);
    doc["language"] = "ar";
    if (target_language) doc["target_language"] = *target_language;
    doc["paths"] = json::object();
    for (const auto& [role, p] : paths) doc["paths"][role] = p;
    return doc.dump(2) + "\n";
}

std::string write_retrieval_like(TaskKind task, const fs::path& dir, const std::string& id,
                                 const std::string& token_prefix) {
    std::vector<std::pair<std::string, std::string>> docs;
    for (size_t i = 0; i < 6; ++i)
        docs.emplace_back("d" + std::to_string(i),
                          pool_text(token_prefix + std::to_string(i) + "x", 8));
    std::vector<std::pair<std::string, std::string>> queries;
    std::string qrels;
    for (size_t i = 0; i < 3; ++i) {
        queries.emplace_back("q" + std::to_string(i), docs[i].second);
        qrels += "q" + std::to_string(i) + "\td" + std::to_string(i) + "\t1\n";
    }

    fs::path data_dir = dir / "data" / id;
    write_file(data_dir / "corpus.jsonl", jsonl_corpus(docs));
    write_file(data_dir / "queries.jsonl", jsonl_corpus(queries));
    write_file(data_dir / "qrels.tsv", qrels);

    std::map<std::string, std::string> paths = {
        {"corpus", (data_dir / "corpus.jsonl").string()},
        {"queries", (data_dir / "queries.jsonl").string()},
        {"qrels", (data_dir / "qrels.tsv").string()},
    };
    fs::path manifest = dir / "manifests" / (id + ".json");
    write_file(manifest, manifest_json(id, task, paths,
                                       task == TaskKind::CrosslingualRetrieval
                                           ? std::optional<std::string>("en")
                                           : std::nullopt));
    return manifest.string();
}

std::string write_reranking(const fs::path& dir) {
    std::string lines;
    for (size_t i = 0; i < 4; ++i) {
        std::string query = pool_text("kq" + std::to_string(i) + "x", 8);
        json rec;
        rec["query"] = query;
        rec["positive"] = {query};
        rec["negative"] = {pool_text("kn" + std::to_string(i) + "a", 8),
                           pool_text("kn" + std::to_string(i) + "b", 8)};
        lines += rec.dump() + "\n";
    }
    fs::path data = dir / "data" / "fx-reranking" / "records.jsonl";
    write_file(data, lines);
    fs::path manifest = dir / "manifests" / "fx-reranking.json";
    write_file(manifest, manifest_json("fx-reranking", TaskKind::Reranking,
                                       {{"records", data.string()}}));
    return manifest.string();
}

std::string write_sts(const fs::path& dir) {
    // Gold order tracks designed token overlap: 0, 4, 8, 12 of 16 tokens,
    // then an identical pair. 16-token sides keep the cosine ladder strictly
    // monotone under the hash embedder at dim 64.
    std::string lines;
    for (size_t i = 0; i < 5; ++i) {
        size_t shared = 4 * i;
        std::string base = "sp" + std::to_string(i) + "t";
        std::string t1, t2;
        for (size_t j = 0; j < 16; ++j) {
            if (!t1.empty()) {
                t1 += " ";
                t2 += " ";
            }
            t1 += base + std::to_string(j);
            t2 += j < shared ? base + std::to_string(j)
                             : base + "alt" + std::to_string(j);
        }
        json rec;
        rec["id"] = "p" + std::to_string(i);
        rec["text1"] = t1;
        rec["text2"] = t2;
        rec["score"] = static_cast<double>(i);
        lines += rec.dump() + "\n";
    }
    fs::path data = dir / "data" / "fx-sts" / "pairs.jsonl";
    write_file(data, lines);
    fs::path manifest = dir / "manifests" / "fx-sts.json";
    write_file(manifest, manifest_json("fx-sts", TaskKind::STS, {{"pairs", data.string()}}));
    return manifest.string();
}

std::string write_classification(const fs::path& dir, uint64_t seed) {
    Rng rng(mix_seed(seed, 0xc1a5));
    auto emit = [&](size_t per_class, size_t salt) {
        std::string lines;
        for (size_t cls = 0; cls < 2; ++cls) {
            for (size_t i = 0; i < per_class; ++i) {
                json rec;
                rec["id"] = "c" + std::to_string(cls) + "_" + std::to_string(salt) + "_" +
                            std::to_string(i);
                rec["text"] = sampled_text("cl" + std::to_string(cls) + "w", 12, 6, rng);
                rec["label"] = cls == 0 ? "alpha" : "beta";
                lines += rec.dump() + "\n";
            }
        }
        return lines;
    };
    fs::path train = dir / "data" / "fx-classification" / "train.jsonl";
    fs::path test = dir / "data" / "fx-classification" / "test.jsonl";
    write_file(train, emit(6, 0));
    write_file(test, emit(4, 1));
    fs::path manifest = dir / "manifests" / "fx-classification.json";
    write_file(manifest,
               manifest_json("fx-classification", TaskKind::Classification,
                             {{"train", train.string()}, {"test", test.string()}}));
    return manifest.string();
}

std::string write_pair_classification(const fs::path& dir) {
    std::string lines;
    for (size_t i = 0; i < 8; ++i) {
        bool dup = i < 4;
        std::string t1 = pool_text("pp" + std::to_string(i) + "l", 8);
        std::string t2 = dup ? t1 : pool_text("pp" + std::to_string(i) + "r", 8);
        json rec;
        rec["id"] = "pc" + std::to_string(i);
        rec["text1"] = t1;
        rec["text2"] = t2;
        rec["label"] = dup ? 1 : 0;
        lines += rec.dump() + "\n";
    }
    fs::path data = dir / "data" / "fx-paircls" / "pairs.jsonl";
    write_file(data, lines);
    fs::path manifest = dir / "manifests" / "fx-paircls.json";
    write_file(manifest, manifest_json("fx-paircls", TaskKind::PairClassification,
                                       {{"pairs", data.string()}}));
    return manifest.string();
}

std::string write_clustering(const fs::path& dir) {
    // Two token-disjoint vocabularies; items share a 6-token core within
    // their group, so the groups form tight, well-separated blobs.
    std::string lines;
    for (size_t cls = 0; cls < 2; ++cls) {
        std::string core = pool_text("gr" + std::to_string(cls) + "core", 6);
        for (size_t i = 0; i < 8; ++i) {
            json rec;
            rec["id"] = "it" + std::to_string(cls) + "_" + std::to_string(i);
            rec["text"] = core + " " + "gr" + std::to_string(cls) + "only" + std::to_string(i);
            rec["label"] = cls == 0 ? "news" : "sport";
            lines += rec.dump() + "\n";
        }
    }
    fs::path data = dir / "data" / "fx-clustering" / "records.jsonl";
    write_file(data, lines);
    fs::path manifest = dir / "manifests" / "fx-clustering.json";
    write_file(manifest, manifest_json("fx-clustering", TaskKind::Clustering,
                                       {{"records", data.string()}}));
    return manifest.string();
}

std::string write_bitext(const fs::path& dir) {
    std::string lines;
    for (size_t i = 0; i < 5; ++i) {
        std::string text = pool_text("bt" + std::to_string(i) + "w", 8);
        json rec;
        rec["id"] = "b" + std::to_string(i);
        rec["source"] = text;
        rec["target"] = text;
        lines += rec.dump() + "\n";
    }
    fs::path data = dir / "data" / "fx-bitext" / "pairs.jsonl";
    write_file(data, lines);
    fs::path manifest = dir / "manifests" / "fx-bitext.json";
    write_file(manifest, manifest_json("fx-bitext", TaskKind::BitextMining,
                                       {{"pairs", data.string()}},
                                       std::optional<std::string>("en")));
    return manifest.string();
}

} // namespace

std::string write_fixture(TaskKind task, const std::string& dir, uint64_t seed) {
    fs::path base = fs::absolute(dir);
    switch (task) {
        case TaskKind::Retrieval:
            return write_retrieval_like(task, base, "fx-retrieval", "r");
        case TaskKind::CrosslingualRetrieval:
            return write_retrieval_like(task, base, "fx-crosslingual", "x");
        case TaskKind::Reranking: return write_reranking(base);
        case TaskKind::STS: return write_sts(base);
        case TaskKind::Classification: return write_classification(base, seed);
        case TaskKind::PairClassification: return write_pair_classification(base);
        case TaskKind::Clustering: return write_clustering(base);
        case TaskKind::BitextMining: return write_bitext(base);
    }
    throw ValidationError("unreachable task kind");
}

std::string write_fixture_suite(const std::string& dir_in, uint64_t seed,
                                size_t max_concurrency) {
    std::string dir = fs::absolute(dir_in).string();
    std::vector<std::string> manifests;
    for (TaskKind task : kAllTasks) manifests.push_back(write_fixture(task, dir, seed));

    json config;
    json backend;
    backend["id"] = "hash64";
    backend["kind"] = "hash";
    backend["model_name"] = "hash-embedder-64";
    backend["dim"] = 64;
    backend["seed"] = seed;
    backend["max_batch"] = 8;
    backend["max_concurrency"] = max_concurrency;
    config["backends"] = {backend};
    config["manifests"] = manifests;
    config["seed"] = seed;
    config["output_dir"] = (fs::path(dir) / "run").string();
    config["report_formats"] = {"json", "markdown"};

    fs::path path = fs::path(dir) / "config.json";
    write_file(path, config.dump(2) + "\n");
    return path.string();
}

} // namespace embench
