#pragma once
// Near-duplicate detection: word n-gram shingles hashed to 64 bits, exact
// Jaccard over candidate pairs from an inverted index, transitive clustering
// by union-find. A semantic variant swaps Jaccard for cosine over backend
// embeddings behind the same clustering op.

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "embench/model.hpp"

namespace embench {

struct ShingleSet {
    std::string doc_id;
    std::unordered_set<uint64_t> shingles;
};

// Tokenizes on Unicode whitespace, lowercases ASCII letters, hashes each
// consecutive n-gram with a fixed seeded 64-bit hash. Documents shorter than
// n tokens yield the single hash of the whole token sequence (empty included).
ShingleSet shingle(const std::string& text, size_t n = 3, const std::string& doc_id = "");

// Parallel shingling with a serial reference kept for testing.
std::vector<ShingleSet> shingle_corpus(
    const std::vector<std::pair<std::string, std::string>>& docs, size_t n = 3);
std::vector<ShingleSet> shingle_corpus_serial(
    const std::vector<std::pair<std::string, std::string>>& docs, size_t n = 3);

// |A intersect B| / |A union B|; 1.0 when both sets are empty.
double jaccard(const ShingleSet& a, const ShingleSet& b);

struct DedupeReport {
    std::vector<std::string> kept;                   // sorted ascending
    std::vector<std::vector<std::string>> clusters;  // multi-member groups
};

// Joins pairs with jaccard >= threshold; within each transitive cluster the
// lexicographically smallest id is kept. Output depends only on the document
// set, not its order.
DedupeReport dedupe_corpus(const std::vector<std::pair<std::string, std::string>>& docs,
                           double threshold = 0.8, size_t n = 3);

// Same clustering with cosine over embeddings as the pair similarity.
DedupeReport dedupe_corpus_semantic(
    const std::vector<std::pair<std::string, std::string>>& docs,
    const std::function<EmbeddingVector(const std::string&)>& embed, double threshold = 0.95);

} // namespace embench
