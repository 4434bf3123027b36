#include "embench/evaluators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "embench/engine.hpp"
#include "embench/kmeans.hpp"
#include "embench/probe.hpp"

namespace embench {

namespace {

constexpr size_t kRetrievalDepth = 10;

std::vector<std::string> texts_of(const std::vector<std::pair<std::string, std::string>>& entries,
                                  bool second) {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& [a, b] : entries) out.push_back(second ? b : a);
    return out;
}

EvalResult retrieval_core(const RetrievalData& data, Embedder& backend,
                          const std::optional<std::string>& instruction) {
    if (data.documents.empty()) throw EmptyDataset("retrieval corpus is empty");
    if (data.queries.empty()) throw EmptyDataset("retrieval query set is empty");

    auto doc_vecs = backend.embed_texts(texts_of(data.documents, true), std::nullopt);
    auto query_vecs = backend.embed_texts(texts_of(data.queries, true), instruction);

    Corpus corpus;
    corpus.reserve(data.documents.size());
    for (size_t i = 0; i < data.documents.size(); ++i)
        corpus.emplace_back(data.documents[i].first, std::move(doc_vecs[i]));

    auto rankings = top_k_many(query_vecs, corpus, kRetrievalDepth);

    double ndcg_sum = 0.0, recall_sum = 0.0, mrr_sum = 0.0;
    size_t scored = 0, skipped = 0;
    for (size_t q = 0; q < data.queries.size(); ++q) {
        auto rels = data.qrels.for_query(data.queries[q].first);
        bool positive = false;
        for (const auto& [_, rel] : rels) positive |= rel >= 1;
        if (!positive) {
            ++skipped;
            continue;
        }
        std::vector<std::string> ranked_ids;
        ranked_ids.reserve(rankings[q].size());
        for (const auto& sd : rankings[q]) ranked_ids.push_back(sd.doc_id);
        ndcg_sum += ndcg_at_k(ranked_ids, rels, kRetrievalDepth);
        recall_sum += recall_at_k(ranked_ids, rels, kRetrievalDepth);
        mrr_sum += mrr_at_k(ranked_ids, rels, kRetrievalDepth);
        ++scored;
    }
    if (scored == 0) throw NoRelevantDocs("no query has a positive judgment");

    EvalResult result;
    result.main_score = {"ndcg@10", ndcg_sum / static_cast<double>(scored)};
    result.auxiliary["recall@10"] = recall_sum / static_cast<double>(scored);
    result.auxiliary["mrr@10"] = mrr_sum / static_cast<double>(scored);
    result.auxiliary["skipped_queries"] = static_cast<double>(skipped);
    return result;
}

} // namespace

EvalResult eval_retrieval(const RetrievalData& data, Embedder& backend,
                          const std::optional<std::string>& instruction) {
    EvalResult result = retrieval_core(data, backend, instruction);
    result.task = TaskKind::Retrieval;
    return result;
}

EvalResult eval_crosslingual_retrieval(const RetrievalData& data, Embedder& backend,
                                       const std::optional<std::string>& instruction) {
    EvalResult result = retrieval_core(data, backend, instruction);
    result.task = TaskKind::CrosslingualRetrieval;
    return result;
}

EvalResult eval_reranking(const RerankingData& data, Embedder& backend,
                          const std::optional<std::string>& instruction) {
    if (data.items.empty()) throw EmptyDataset("reranking item list is empty");

    double ap_sum = 0.0;
    for (const auto& item : data.items) {
        if (item.positives.empty())
            throw ItemWithoutPositive("reranking item \"" + item.query + "\" has no positive");
        auto query_vec = backend.embed_texts({item.query}, instruction).front();

        std::vector<std::string> candidates = item.positives;
        candidates.insert(candidates.end(), item.negatives.begin(), item.negatives.end());
        auto cand_vecs = backend.embed_texts(candidates, std::nullopt);

        std::vector<double> scores(candidates.size());
        for (size_t i = 0; i < candidates.size(); ++i) scores[i] = cosine(query_vec, cand_vecs[i]);

        std::vector<size_t> order(candidates.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return scores[a] > scores[b]; });
        std::vector<int> ranked(candidates.size());
        for (size_t i = 0; i < order.size(); ++i)
            ranked[i] = order[i] < item.positives.size() ? 1 : 0;
        ap_sum += average_precision_ranked(ranked);
    }

    EvalResult result;
    result.task = TaskKind::Reranking;
    result.main_score = {"map", ap_sum / static_cast<double>(data.items.size())};
    result.auxiliary["items"] = static_cast<double>(data.items.size());
    return result;
}

EvalResult eval_sts(const StsData& data, Embedder& backend,
                    const std::optional<std::string>& instruction) {
    if (data.pairs.empty()) throw EmptyDataset("sts pair list is empty");

    std::vector<std::string> left, right;
    std::vector<double> gold;
    for (const auto& p : data.pairs) {
        left.push_back(p.text1);
        right.push_back(p.text2);
        gold.push_back(p.gold_score);
    }
    auto left_vecs = backend.embed_texts(left, instruction);
    auto right_vecs = backend.embed_texts(right, instruction);

    std::vector<double> sims(data.pairs.size());
    for (size_t i = 0; i < data.pairs.size(); ++i)
        sims[i] = cosine(left_vecs[i], right_vecs[i]);

    EvalResult result;
    result.task = TaskKind::STS;
    result.main_score = {"spearman", spearman(sims, gold)};
    result.auxiliary["pearson"] = pearson(sims, gold);
    return result;
}

namespace {

void replace_all_in(std::string& s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

} // namespace

EvalResult eval_classification(const ClassificationData& data, Embedder& backend,
                               const std::optional<std::string>& instruction) {
    if (data.train.empty() || data.test.empty())
        throw EmptyDataset("classification split is empty");

    std::set<std::string> label_set;
    for (const auto& [_, label] : data.train) label_set.insert(label);

    // The classification prompt's {options} slot is the category list.
    std::optional<std::string> filled = instruction;
    if (filled) {
        std::string options;
        for (const auto& label : label_set) {
            if (!options.empty()) options += ", ";
            options += label;
        }
        replace_all_in(*filled, "{options}", options);
    }

    auto train_vecs = backend.embed_texts(texts_of(data.train, false), filled);
    auto test_vecs = backend.embed_texts(texts_of(data.test, false), filled);

    std::vector<std::pair<EmbeddingVector, std::string>> train_set;
    train_set.reserve(data.train.size());
    for (size_t i = 0; i < data.train.size(); ++i)
        train_set.emplace_back(std::move(train_vecs[i]), data.train[i].second);

    ClassifierModel model = train_linear_classifier(train_set);
    const auto& classes = model.classes();

    std::vector<std::vector<double>> scores;
    std::vector<std::string> pred, gold;
    std::vector<size_t> gold_idx;
    scores.reserve(data.test.size());
    for (size_t i = 0; i < data.test.size(); ++i) {
        scores.push_back(model.predict_proba(test_vecs[i]));
        size_t best = 0;
        for (size_t j = 1; j < scores.back().size(); ++j)
            if (scores.back()[j] > scores.back()[best]) best = j;
        pred.push_back(classes[best]);
        gold.push_back(data.test[i].second);
        gold_idx.push_back(static_cast<size_t>(
            std::lower_bound(classes.begin(), classes.end(), data.test[i].second) -
            classes.begin()));
    }

    EvalResult result;
    result.task = TaskKind::Classification;
    result.main_score = {"ap", macro_ovr_ap(scores, gold_idx, classes.size())};
    result.auxiliary["accuracy"] = accuracy(pred, gold);
    result.auxiliary["macro_f1"] = macro_f1(pred, gold);
    return result;
}

EvalResult eval_pair_classification(const PairClassificationData& data, Embedder& backend,
                                    const std::optional<std::string>& instruction) {
    if (data.pairs.empty()) throw EmptyDataset("pair classification set is empty");

    std::vector<std::string> left, right;
    std::vector<int> labels;
    for (const auto& p : data.pairs) {
        left.push_back(p.text1);
        right.push_back(p.text2);
        labels.push_back(p.label);
    }
    auto left_vecs = backend.embed_texts(left, instruction);
    auto right_vecs = backend.embed_texts(right, instruction);

    std::vector<double> sims(data.pairs.size());
    for (size_t i = 0; i < data.pairs.size(); ++i)
        sims[i] = cosine(left_vecs[i], right_vecs[i]);

    ThresholdResult thr = best_threshold_ap(sims, labels);

    EvalResult result;
    result.task = TaskKind::PairClassification;
    result.main_score = {"ap", thr.ap};
    result.auxiliary["best_accuracy"] = thr.best_accuracy;
    // Sentinel thresholds are clamped to a finite value outside cosine range.
    result.auxiliary["threshold"] =
        std::isfinite(thr.threshold) ? thr.threshold : std::copysign(2.0, thr.threshold);
    return result;
}

EvalResult eval_clustering(const ClusteringData& data, Embedder& backend,
                           const std::optional<std::string>& instruction, uint64_t seed) {
    if (data.items.empty()) throw EmptyDataset("clustering item list is empty");

    std::set<std::string> label_set;
    for (const auto& [_, label] : data.items) label_set.insert(label);
    const size_t k = label_set.size();
    if (data.items.size() < k)
        throw FewerPointsThanClusters("fewer points than gold clusters");

    auto vecs = backend.embed_texts(texts_of(data.items, false), instruction);
    std::vector<std::string> gold = texts_of(data.items, true);

    constexpr int kOuterSeeds = 5;
    double v_sum = 0.0, v_min = 1.0, v_max = 0.0;
    for (int s = 0; s < kOuterSeeds; ++s) {
        KMeansResult run = kmeans(vecs, k, seed + static_cast<uint64_t>(s));
        double v = v_measure(gold, run.assignment);
        v_sum += v;
        v_min = std::min(v_min, v);
        v_max = std::max(v_max, v);
    }

    EvalResult result;
    result.task = TaskKind::Clustering;
    result.main_score = {"v_measure", v_sum / kOuterSeeds};
    result.auxiliary["v_measure_min"] = v_min;
    result.auxiliary["v_measure_max"] = v_max;
    result.auxiliary["k"] = static_cast<double>(k);
    if (k == 1) result.auxiliary["degenerate_single_class"] = 1.0;
    return result;
}

EvalResult eval_bitext(const BitextData& data, Embedder& backend,
                       const std::optional<std::string>& instruction, bool both_directions) {
    if (data.pairs.empty()) throw EmptySide("bitext has no pairs to mine");

    std::vector<std::string> sources, targets;
    for (const auto& [s, t] : data.pairs) {
        sources.push_back(s);
        targets.push_back(t);
    }

    auto source_vecs = backend.embed_texts(sources, instruction);
    auto target_vecs = backend.embed_texts(targets, std::nullopt);

    auto sims = similarity_matrix(source_vecs, target_vecs);

    std::set<std::pair<int, int>> predicted;
    for (size_t i = 0; i < sources.size(); ++i) {
        size_t best = 0;
        for (size_t j = 1; j < targets.size(); ++j)
            if (sims[i][j] > sims[i][best]) best = j;
        predicted.insert({static_cast<int>(i), static_cast<int>(best)});
    }
    if (both_directions) {
        for (size_t j = 0; j < targets.size(); ++j) {
            size_t best = 0;
            for (size_t i = 1; i < sources.size(); ++i)
                if (sims[i][j] > sims[best][j]) best = i;
            predicted.insert({static_cast<int>(best), static_cast<int>(j)});
        }
    }

    std::set<std::pair<int, int>> gold;
    for (size_t i = 0; i < data.pairs.size(); ++i)
        gold.insert({static_cast<int>(i), static_cast<int>(i)});

    F1Result f1 = pair_f1(predicted, gold);

    EvalResult result;
    result.task = TaskKind::BitextMining;
    result.main_score = {"f1", f1.f1};
    result.auxiliary["precision"] = f1.precision;
    result.auxiliary["recall"] = f1.recall;
    return result;
}

EvalResult evaluate_dataset(const DatasetManifest& manifest, const TaskData& data,
                            Embedder& backend, const std::optional<std::string>& instruction,
                            const EvalOptions& options) {
    UsageLedger before = backend.ledger_snapshot();
    auto t0 = std::chrono::steady_clock::now();

    EvalResult result;
    switch (manifest.task) {
        case TaskKind::Retrieval:
            result = eval_retrieval(std::get<RetrievalData>(data), backend, instruction);
            break;
        case TaskKind::CrosslingualRetrieval:
            result = eval_crosslingual_retrieval(std::get<RetrievalData>(data), backend,
                                                 instruction);
            break;
        case TaskKind::Reranking:
            result = eval_reranking(std::get<RerankingData>(data), backend, instruction);
            break;
        case TaskKind::STS:
            result = eval_sts(std::get<StsData>(data), backend, instruction);
            break;
        case TaskKind::Classification:
            result = eval_classification(std::get<ClassificationData>(data), backend, instruction);
            break;
        case TaskKind::PairClassification:
            result = eval_pair_classification(std::get<PairClassificationData>(data), backend,
                                              instruction);
            break;
        case TaskKind::Clustering:
            result = eval_clustering(std::get<ClusteringData>(data), backend, instruction,
                                     options.seed);
            break;
        case TaskKind::BitextMining:
            result = eval_bitext(std::get<BitextData>(data), backend, instruction,
                                 options.bitext_both_directions);
            break;
    }

    auto t1 = std::chrono::steady_clock::now();
    UsageLedger after = backend.ledger_snapshot();

    result.dataset_id = manifest.id;
    result.language = manifest.language;
    result.target_language = manifest.target_language;
    result.seed = options.seed;
    result.wall_clock_s = std::chrono::duration<double>(t1 - t0).count();

    result.ledger_delta.requests = after.requests - before.requests;
    result.ledger_delta.texts_embedded = after.texts_embedded - before.texts_embedded;
    result.ledger_delta.tokens_estimated = after.tokens_estimated - before.tokens_estimated;
    result.ledger_delta.cost_estimate = after.cost_estimate - before.cost_estimate;
    result.ledger_delta.latencies_ms.assign(
        after.latencies_ms.begin() + static_cast<long>(before.latencies_ms.size()),
        after.latencies_ms.end());

    if (result.main_score.name != manifest.metric) {
        // An override promotes one of the evaluator's auxiliary metrics to
        // the headline; anything else is a contract violation.
        auto aux = result.auxiliary.find(manifest.metric);
        if (!manifest.metric_override || aux == result.auxiliary.end())
            throw ValidationError("evaluator produced metric \"" + result.main_score.name +
                                  "\" but manifest \"" + manifest.id + "\" expects \"" +
                                  manifest.metric + "\"");
        result.auxiliary[result.main_score.name] = result.main_score.value;
        result.main_score = {manifest.metric, aux->second};
        result.auxiliary.erase(manifest.metric);
    }
    return result;
}

} // namespace embench
