#pragma once
// Hard-negative mining over an embedded corpus, plus the contrastive loss as
// a diagnostic scorer (no training loop lives here).

#include <string>
#include <vector>

#include "embench/engine.hpp"
#include "embench/model.hpp"

namespace embench {

struct MinedExample {
    std::string query;
    std::string positive;                 // the positive document's text
    std::vector<std::string> negatives;   // texts, similarity order
    std::vector<size_t> negative_ranks;   // 1-based ranks in the full ordering
};

// Ranks the corpus by cosine to the embedded query (exact ties by ascending
// doc id), removes the positive wherever it ranks, skips the next skip_top
// entries, and returns the following n documents. Throws UnknownPositive and
// CorpusTooSmall.
MinedExample mine_hard_negatives(const std::string& query_text,
                                 const EmbeddingVector& query_vec,
                                 const std::string& positive_id,
                                 const Corpus& corpus,
                                 const std::vector<std::string>& corpus_texts,
                                 size_t n, size_t skip_top = 0);

// The default sweep grid for negative-count experiments.
std::vector<int> supported_negative_counts();

// -log( phi(q,pos) / (phi(q,pos) + sum phi(q,neg_i)) ) with
// phi(q,d) = exp(cosine(q,d)/temperature). Computed in log-space, so small
// temperatures cannot overflow. Empty negatives give exactly 0.
double info_nce(const EmbeddingVector& query, const EmbeddingVector& positive,
                const std::vector<EmbeddingVector>& negatives, double temperature = 0.05);

} // namespace embench
