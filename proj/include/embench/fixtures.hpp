#pragma once
// Deterministic test assets: the seeded hash embedder (a stand-in backend
// that needs no network or weights) and tiny on-disk datasets for every task
// family, written in the standard JSONL/TSV formats.

#include <cstdint>
#include <string>
#include <vector>

#include "embench/model.hpp"

namespace embench {

// Pure function of (text, dim, seed): each whitespace token is hashed and
// scattered into the vector, then the vector is normalized to unit norm.
// Identical texts map to identical vectors; token overlap raises expected
// cosine. Whitespace-only text falls back to a single empty-sequence token.
EmbeddingVector hash_embed(const std::string& text, size_t dim, uint64_t seed);

struct HashEmbedder {
    size_t dim = 64;
    uint64_t seed = 42;
    EmbeddingVector operator()(const std::string& text) const {
        return hash_embed(text, dim, seed);
    }
};

// Writes one tiny dataset (files + manifest) for the task under dir and
// returns the manifest path. Datasets are constructed so the evaluator's
// main score under HashEmbedder is a known clean value (1.0 unless noted).
std::string write_fixture(TaskKind task, const std::string& dir, uint64_t seed);

// Writes fixtures for all eight task families plus a ready-to-run config
// using the hash backend. Returns the run-config path.
std::string write_fixture_suite(const std::string& dir, uint64_t seed,
                                size_t max_concurrency = 4);

} // namespace embench
