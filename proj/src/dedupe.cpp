#include "embench/dedupe.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "embench/digest.hpp"
#include "embench/engine.hpp"

namespace embench {

namespace {

constexpr uint64_t kShingleSeed = 0x5eed5eed5eed5eedULL;

// Code points with the Unicode White_Space property that matter for text
// corpora; ASCII whitespace plus the common non-ASCII spaces.
bool is_space_cp(uint32_t cp) {
    switch (cp) {
        case 0x09: case 0x0a: case 0x0b: case 0x0c: case 0x0d: case 0x20:
        case 0x85: case 0xa0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202f: case 0x205f: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200a;
    }
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        uint32_t cp = c;
        size_t len = 1;
        if ((c & 0x80) != 0) {
            if ((c & 0xe0) == 0xc0) len = 2;
            else if ((c & 0xf0) == 0xe0) len = 3;
            else if ((c & 0xf8) == 0xf0) len = 4;
            if (i + len > text.size()) len = 1;
            cp = c & (0x7f >> len);
            for (size_t j = 1; j < len; ++j) cp = (cp << 6) | (text[i + j] & 0x3f);
        }
        if (is_space_cp(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            for (size_t j = 0; j < len; ++j) {
                char ch = text[i + j];
                if (len == 1 && ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
                current.push_back(ch);
            }
        }
        i += len;
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

uint64_t hash_ngram(const std::vector<std::string>& tokens, size_t begin, size_t count) {
    uint64_t h = kShingleSeed;
    for (size_t i = begin; i < begin + count; ++i) {
        h = fnv1a64(tokens[i], h);
        h = fnv1a64(std::string(1, '\x1f'), h);
    }
    return h;
}

} // namespace

ShingleSet shingle(const std::string& text, size_t n, const std::string& doc_id) {
    if (n == 0) throw ValidationError("shingle size must be >= 1");
    ShingleSet s;
    s.doc_id = doc_id;
    auto tokens = tokenize(text);
    if (tokens.size() < n) {
        s.shingles.insert(hash_ngram(tokens, 0, tokens.size()));
        return s;
    }
    for (size_t i = 0; i + n <= tokens.size(); ++i)
        s.shingles.insert(hash_ngram(tokens, i, n));
    return s;
}

std::vector<ShingleSet> shingle_corpus_serial(
    const std::vector<std::pair<std::string, std::string>>& docs, size_t n) {
    std::vector<ShingleSet> out(docs.size());
    for (size_t i = 0; i < docs.size(); ++i) out[i] = shingle(docs[i].second, n, docs[i].first);
    return out;
}

std::vector<ShingleSet> shingle_corpus(
    const std::vector<std::pair<std::string, std::string>>& docs, size_t n) {
    if (n == 0) throw ValidationError("shingle size must be >= 1");
    std::vector<ShingleSet> out(docs.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (long long i = 0; i < static_cast<long long>(docs.size()); ++i)
        out[static_cast<size_t>(i)] =
            shingle(docs[static_cast<size_t>(i)].second, n, docs[static_cast<size_t>(i)].first);
    return out;
}

double jaccard(const ShingleSet& a, const ShingleSet& b) {
    if (a.shingles.empty() && b.shingles.empty()) return 1.0;
    const auto& small = a.shingles.size() <= b.shingles.size() ? a.shingles : b.shingles;
    const auto& large = a.shingles.size() <= b.shingles.size() ? b.shingles : a.shingles;
    size_t inter = 0;
    for (uint64_t h : small)
        if (large.count(h)) ++inter;
    size_t uni = a.shingles.size() + b.shingles.size() - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

class UnionFind {
public:
    explicit UnionFind(size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    size_t find(size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void join(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<size_t> parent_;
};

DedupeReport cluster_by_pairs(const std::vector<std::string>& ids,
                              const std::vector<std::pair<size_t, size_t>>& joined_pairs) {
    // Work over ids sorted lexicographically so the result cannot depend on
    // input order.
    const size_t n = ids.size();
    UnionFind uf(n);
    for (const auto& [a, b] : joined_pairs) uf.join(a, b);

    std::map<std::string, std::vector<std::string>> components;  // min-id -> ids
    std::vector<std::string> root_min(n);
    std::map<size_t, std::string> min_of_root;
    for (size_t i = 0; i < n; ++i) {
        size_t r = uf.find(i);
        auto it = min_of_root.find(r);
        if (it == min_of_root.end() || ids[i] < it->second) min_of_root[r] = ids[i];
    }
    for (size_t i = 0; i < n; ++i) components[min_of_root[uf.find(i)]].push_back(ids[i]);

    DedupeReport report;
    for (auto& [rep, members] : components) {
        report.kept.push_back(rep);
        if (members.size() > 1) {
            std::sort(members.begin(), members.end());
            report.clusters.push_back(members);
        }
    }
    std::sort(report.kept.begin(), report.kept.end());
    std::sort(report.clusters.begin(), report.clusters.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return report;
}

} // namespace

DedupeReport dedupe_corpus(const std::vector<std::pair<std::string, std::string>>& docs,
                           double threshold, size_t n) {
    if (threshold <= 0.0 || threshold > 1.0)
        throw ValidationError("dedupe threshold must lie in (0, 1]");

    // Canonical processing order: ids ascending.
    std::vector<size_t> order(docs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return docs[a].first < docs[b].first; });
    std::vector<std::string> ids(docs.size());
    std::vector<std::pair<std::string, std::string>> sorted_docs(docs.size());
    for (size_t i = 0; i < docs.size(); ++i) {
        sorted_docs[i] = docs[order[i]];
        ids[i] = sorted_docs[i].first;
    }
    for (size_t i = 0; i + 1 < ids.size(); ++i)
        if (ids[i] == ids[i + 1]) throw ValidationError("duplicate doc id \"" + ids[i] + "\"");

    auto sets = shingle_corpus(sorted_docs, n);

    // Inverted index shingle -> docs; only pairs sharing a shingle compare.
    std::unordered_map<uint64_t, std::vector<size_t>> index;
    for (size_t i = 0; i < sets.size(); ++i)
        for (uint64_t h : sets[i].shingles) index[h].push_back(i);

    std::unordered_set<uint64_t> seen_pairs;
    std::vector<std::pair<size_t, size_t>> candidates;
    for (const auto& [_, bucket] : index) {
        for (size_t x = 0; x < bucket.size(); ++x)
            for (size_t y = x + 1; y < bucket.size(); ++y) {
                size_t a = std::min(bucket[x], bucket[y]);
                size_t b = std::max(bucket[x], bucket[y]);
                if (seen_pairs.insert((static_cast<uint64_t>(a) << 32) | b).second)
                    candidates.emplace_back(a, b);
            }
    }

    std::vector<char> joined(candidates.size(), 0);
#pragma omp parallel for schedule(dynamic, 256)
    for (long long i = 0; i < static_cast<long long>(candidates.size()); ++i) {
        const auto& [a, b] = candidates[static_cast<size_t>(i)];
        if (jaccard(sets[a], sets[b]) >= threshold) joined[static_cast<size_t>(i)] = 1;
    }

    std::vector<std::pair<size_t, size_t>> joined_pairs;
    for (size_t i = 0; i < candidates.size(); ++i)
        if (joined[i]) joined_pairs.push_back(candidates[i]);

    return cluster_by_pairs(ids, joined_pairs);
}

DedupeReport dedupe_corpus_semantic(
    const std::vector<std::pair<std::string, std::string>>& docs,
    const std::function<EmbeddingVector(const std::string&)>& embed, double threshold) {
    std::vector<size_t> order(docs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return docs[a].first < docs[b].first; });
    std::vector<std::string> ids(docs.size());
    std::vector<EmbeddingVector> vecs(docs.size());
    for (size_t i = 0; i < docs.size(); ++i) {
        ids[i] = docs[order[i]].first;
        vecs[i] = embed(docs[order[i]].second);
    }
    for (size_t i = 0; i + 1 < ids.size(); ++i)
        if (ids[i] == ids[i + 1]) throw ValidationError("duplicate doc id \"" + ids[i] + "\"");

    std::vector<std::pair<size_t, size_t>> joined_pairs;
    for (size_t a = 0; a < vecs.size(); ++a)
        for (size_t b = a + 1; b < vecs.size(); ++b)
            if (cosine(vecs[a], vecs[b]) >= threshold) joined_pairs.emplace_back(a, b);

    return cluster_by_pairs(ids, joined_pairs);
}

} // namespace embench
