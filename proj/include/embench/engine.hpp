#pragma once
// Exact dense similarity kernels. Every kernel has an OpenMP-parallel form
// and a serial reference kept for testing; both must agree bitwise. Per-pair
// accumulation is f64 in strict element order, so scores are identical no
// matter how the work is split across threads.

#include <string>
#include <vector>

#include "embench/model.hpp"

namespace embench {

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
};

// Strict-order f64 dot product of two f32 vectors. The one accumulation
// routine every kernel shares.
double dot_f64(const std::vector<float>& a, const std::vector<float>& b);

// dot(a,b) / (|a||b|), clamped to [-1, 1]. Throws DimensionMismatch and
// ZeroVector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

using Corpus = std::vector<std::pair<std::string, EmbeddingVector>>;

// The min(k, |corpus|) highest-cosine documents, score descending, exact
// score ties broken by ascending doc_id. Exhaustive scan, single query.
std::vector<ScoredDoc> top_k(const EmbeddingVector& query, const Corpus& corpus, size_t k);

// Batched top-k, parallel across queries. Output[i] is bitwise identical to
// top_k(queries[i], corpus, k) at any thread count.
std::vector<std::vector<ScoredDoc>> top_k_many(const std::vector<EmbeddingVector>& queries,
                                               const Corpus& corpus, size_t k);
std::vector<std::vector<ScoredDoc>> top_k_many_serial(const std::vector<EmbeddingVector>& queries,
                                                      const Corpus& corpus, size_t k);

// entry (i,j) = cosine(rows[i], cols[j]), row-major, parallel across rows.
std::vector<std::vector<double>> similarity_matrix(const std::vector<EmbeddingVector>& rows,
                                                   const std::vector<EmbeddingVector>& cols);
std::vector<std::vector<double>> similarity_matrix_serial(const std::vector<EmbeddingVector>& rows,
                                                          const std::vector<EmbeddingVector>& cols);

} // namespace embench
