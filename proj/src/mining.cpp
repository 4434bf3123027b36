#include "embench/mining.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace embench {

MinedExample mine_hard_negatives(const std::string& query_text,
                                 const EmbeddingVector& query_vec,
                                 const std::string& positive_id, const Corpus& corpus,
                                 const std::vector<std::string>& corpus_texts, size_t n,
                                 size_t skip_top) {
    if (corpus.size() != corpus_texts.size())
        throw ValidationError("corpus vectors and texts differ in length");

    std::unordered_map<std::string, size_t> by_id;
    for (size_t i = 0; i < corpus.size(); ++i) by_id[corpus[i].first] = i;
    auto pos_it = by_id.find(positive_id);
    if (pos_it == by_id.end())
        throw UnknownPositive("positive id \"" + positive_id + "\" not in corpus");
    if (corpus.size() < 2 || n > corpus.size() - 1)
        throw CorpusTooSmall("need n <= corpus size - 1, have n=" + std::to_string(n) +
                             " over " + std::to_string(corpus.size()) + " docs");

    auto ranking = top_k(query_vec, corpus, corpus.size());

    MinedExample out;
    out.query = query_text;
    out.positive = corpus_texts[pos_it->second];

    size_t skipped = 0;
    for (size_t rank = 0; rank < ranking.size() && out.negatives.size() < n; ++rank) {
        const std::string& id = ranking[rank].doc_id;
        if (id == positive_id) continue;
        if (skipped < skip_top) {
            ++skipped;
            continue;
        }
        out.negatives.push_back(corpus_texts[by_id[id]]);
        out.negative_ranks.push_back(rank + 1);
    }
    if (out.negatives.size() < n)
        throw CorpusTooSmall("skip_top leaves fewer than n candidates");
    return out;
}

std::vector<int> supported_negative_counts() { return {1, 3, 7, 15, 31}; }

double info_nce(const EmbeddingVector& query, const EmbeddingVector& positive,
                const std::vector<EmbeddingVector>& negatives, double temperature) {
    if (temperature <= 0.0)
        throw NonPositiveTemperature("temperature must be > 0");

    // -log(phi+/(phi+ + sum phi-)) = logsumexp(s_pos, s_negs) - s_pos,
    // max-shifted so small temperatures cannot overflow.
    const double pos_score = cosine(query, positive) / temperature;
    std::vector<double> scores;
    scores.reserve(negatives.size());
    double peak = pos_score;
    for (const auto& neg : negatives) {
        scores.push_back(cosine(query, neg) / temperature);
        peak = std::max(peak, scores.back());
    }
    double sum = std::exp(pos_score - peak);
    for (double s : scores) sum += std::exp(s - peak);
    return peak + std::log(sum) - pos_score;
}

} // namespace embench
