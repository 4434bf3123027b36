#include "embench/engine.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace embench {

double dot_f64(const std::vector<float>& a, const std::vector<float>& b) {
    double acc = 0.0;
    const size_t n = a.size();
    for (size_t i = 0; i < n; ++i)
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return acc;
}

namespace {

void check_dims(size_t a, size_t b) {
    if (a != b)
        throw DimensionMismatch("vector dims differ: " + std::to_string(a) + " vs " +
                                std::to_string(b));
}

double cosine_from_dot(double dot, double norm_a, double norm_b) {
    double c = dot / (norm_a * norm_b);
    return std::clamp(c, -1.0, 1.0);
}

// Total order used everywhere a ranking is produced.
bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
}

// Bounded selection buffer: keeps the best k elements under ranks_before.
class TopKBuffer {
public:
    explicit TopKBuffer(size_t k) : k_(k) {}

    void offer(const std::string& id, double score) {
        ScoredDoc cand{id, score};
        if (heap_.size() < k_) {
            heap_.push_back(std::move(cand));
            std::push_heap(heap_.begin(), heap_.end(), ranks_before);
            return;
        }
        if (ranks_before(cand, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), ranks_before);
            heap_.back() = std::move(cand);
            std::push_heap(heap_.begin(), heap_.end(), ranks_before);
        }
    }

    std::vector<ScoredDoc> sorted() && {
        std::sort_heap(heap_.begin(), heap_.end(), ranks_before);
        return std::move(heap_);
    }

private:
    size_t k_;
    std::vector<ScoredDoc> heap_;  // max-heap on ranks_before: front = worst kept
};

// Exceptions must not escape an OpenMP region; kernels validate inputs before
// going parallel.
void validate_search_inputs(const std::vector<EmbeddingVector>& queries, const Corpus& corpus) {
    if (corpus.empty()) throw EmptyDataset("top_k over an empty corpus");
    const size_t dim = corpus.front().second.dim();
    for (const auto& [id, vec] : corpus) {
        check_dims(dim, vec.dim());
        if (vec.norm == 0.0) throw ZeroVector("corpus vector \"" + id + "\" has zero norm");
    }
    for (const auto& q : queries) {
        check_dims(q.dim(), dim);
        if (q.norm == 0.0) throw ZeroVector("query vector has zero norm");
    }
}

} // namespace

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    check_dims(a.dim(), b.dim());
    if (a.norm == 0.0 || b.norm == 0.0) throw ZeroVector("cosine of a zero vector");
    return cosine_from_dot(dot_f64(a.values, b.values), a.norm, b.norm);
}

std::vector<ScoredDoc> top_k(const EmbeddingVector& query, const Corpus& corpus, size_t k) {
    validate_search_inputs({query}, corpus);
    TopKBuffer buf(std::min(k, corpus.size()));
    for (const auto& [id, vec] : corpus)
        buf.offer(id, cosine_from_dot(dot_f64(query.values, vec.values), query.norm, vec.norm));
    return std::move(buf).sorted();
}

std::vector<std::vector<ScoredDoc>> top_k_many_serial(
    const std::vector<EmbeddingVector>& queries, const Corpus& corpus, size_t k) {
    std::vector<std::vector<ScoredDoc>> out(queries.size());
    for (size_t q = 0; q < queries.size(); ++q) out[q] = top_k(queries[q], corpus, k);
    return out;
}

std::vector<std::vector<ScoredDoc>> top_k_many(const std::vector<EmbeddingVector>& queries,
                                               const Corpus& corpus, size_t k) {
    validate_search_inputs(queries, corpus);
    const size_t nq = queries.size();
    const size_t nd = corpus.size();
    const size_t dim = corpus.front().second.dim();

    std::vector<std::vector<ScoredDoc>> out(nq);

    // Query tiles stream the corpus once per tile; each query's accumulation
    // stays strict element order, so results match top_k bitwise.
    constexpr size_t kTile = 32;
    const size_t tiles = (nq + kTile - 1) / kTile;

#pragma omp parallel for schedule(dynamic)
    for (long long t = 0; t < static_cast<long long>(tiles); ++t) {
        const size_t q0 = static_cast<size_t>(t) * kTile;
        const size_t q1 = std::min(nq, q0 + kTile);
        const size_t tq = q1 - q0;

        std::vector<TopKBuffer> bufs;
        bufs.reserve(tq);
        for (size_t i = 0; i < tq; ++i) bufs.emplace_back(std::min(k, nd));

        // Tile-major query layout: lane i of element e sits at [e*kTile + i],
        // so the lane loop below runs over contiguous memory and vectorizes.
        // Each query still accumulates in strict element order, which keeps
        // every score bitwise equal to the single-query path.
        std::vector<double> tile(dim * kTile, 0.0);
        for (size_t i = 0; i < tq; ++i)
            for (size_t e = 0; e < dim; ++e)
                tile[e * kTile + i] = static_cast<double>(queries[q0 + i].values[e]);

        double acc[kTile];
        for (size_t d = 0; d < nd; ++d) {
            const float* dvals = corpus[d].second.values.data();
            for (size_t i = 0; i < kTile; ++i) acc[i] = 0.0;
            const double* lane = tile.data();
            for (size_t e = 0; e < dim; ++e, lane += kTile) {
                const double dval = static_cast<double>(dvals[e]);
                for (size_t i = 0; i < kTile; ++i) acc[i] += lane[i] * dval;
            }
            for (size_t i = 0; i < tq; ++i)
                bufs[i].offer(corpus[d].first,
                              cosine_from_dot(acc[i], queries[q0 + i].norm, corpus[d].second.norm));
        }
        for (size_t i = 0; i < tq; ++i) out[q0 + i] = std::move(bufs[i]).sorted();
    }
    return out;
}

std::vector<std::vector<double>> similarity_matrix_serial(
    const std::vector<EmbeddingVector>& rows, const std::vector<EmbeddingVector>& cols) {
    std::vector<std::vector<double>> m(rows.size(), std::vector<double>(cols.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j) m[i][j] = cosine(rows[i], cols[j]);
    return m;
}

std::vector<std::vector<double>> similarity_matrix(const std::vector<EmbeddingVector>& rows,
                                                   const std::vector<EmbeddingVector>& cols) {
    for (const auto& r : rows) {
        if (r.norm == 0.0) throw ZeroVector("similarity_matrix row has zero norm");
        if (!cols.empty()) check_dims(r.dim(), cols.front().dim());
    }
    for (const auto& c : cols) {
        if (c.norm == 0.0) throw ZeroVector("similarity_matrix column has zero norm");
        if (!cols.empty()) check_dims(c.dim(), cols.front().dim());
    }
    std::vector<std::vector<double>> m(rows.size(), std::vector<double>(cols.size()));
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(rows.size()); ++i) {
        const auto& row = rows[static_cast<size_t>(i)];
        for (size_t j = 0; j < cols.size(); ++j)
            m[static_cast<size_t>(i)][j] =
                cosine_from_dot(dot_f64(row.values, cols[j].values), row.norm, cols[j].norm);
    }
    return m;
}

} // namespace embench
