#include "embench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace embench {

namespace {

bool has_positive(const std::map<std::string, int>& rels) {
    for (const auto& [_, rel] : rels)
        if (rel >= 1) return true;
    return false;
}

} // namespace

double ndcg_at_k(const std::vector<std::string>& ranking,
                 const std::map<std::string, int>& rels, size_t k) {
    if (!has_positive(rels)) throw NoRelevantDocs("no document with relevance >= 1");

    double dcg = 0.0;
    const size_t depth = std::min(k, ranking.size());
    for (size_t i = 0; i < depth; ++i) {
        auto it = rels.find(ranking[i]);
        if (it != rels.end() && it->second > 0)
            dcg += static_cast<double>(it->second) / std::log2(static_cast<double>(i) + 2.0);
    }

    std::vector<int> grades;
    grades.reserve(rels.size());
    for (const auto& [_, rel] : rels) grades.push_back(rel);
    std::sort(grades.begin(), grades.end(), std::greater<int>());
    double idcg = 0.0;
    for (size_t i = 0; i < std::min(k, grades.size()); ++i)
        idcg += static_cast<double>(grades[i]) / std::log2(static_cast<double>(i) + 2.0);

    return dcg / idcg;
}

double recall_at_k(const std::vector<std::string>& ranking,
                   const std::map<std::string, int>& rels, size_t k) {
    size_t total = 0, found = 0;
    for (const auto& [_, rel] : rels)
        if (rel >= 1) ++total;
    if (total == 0) throw NoRelevantDocs("no document with relevance >= 1");
    for (size_t i = 0; i < std::min(k, ranking.size()); ++i) {
        auto it = rels.find(ranking[i]);
        if (it != rels.end() && it->second >= 1) ++found;
    }
    return static_cast<double>(found) / static_cast<double>(total);
}

double mrr_at_k(const std::vector<std::string>& ranking,
                const std::map<std::string, int>& rels, size_t k) {
    for (size_t i = 0; i < std::min(k, ranking.size()); ++i) {
        auto it = rels.find(ranking[i]);
        if (it != rels.end() && it->second >= 1)
            return 1.0 / static_cast<double>(i + 1);
    }
    return 0.0;
}

double average_precision_ranked(const std::vector<int>& ranking) {
    size_t positives = 0;
    for (int label : ranking)
        if (label == 1) ++positives;
    if (positives == 0) throw NoPositives("ranking has no positive label");

    double sum = 0.0;
    size_t seen = 0;
    for (size_t i = 0; i < ranking.size(); ++i) {
        if (ranking[i] == 1) {
            ++seen;
            sum += static_cast<double>(seen) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(positives);
}

namespace {

// Fractional (average) ranks, 1-based.
std::vector<double> fractional_ranks(const std::vector<double>& values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw LengthMismatch("pearson inputs differ in length");
    if (x.size() < 2) throw DegenerateInput("pearson needs at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("pearson over a constant list");
    return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw LengthMismatch("spearman inputs differ in length");
    if (x.size() < 2) throw DegenerateInput("spearman needs at least 2 points");
    return pearson(fractional_ranks(x), fractional_ranks(y));
}

double v_measure(const std::vector<std::string>& gold, const std::vector<int>& pred) {
    if (gold.size() != pred.size()) throw LengthMismatch("v_measure inputs differ in length");
    if (gold.empty()) throw LengthMismatch("v_measure over empty input");
    const double n = static_cast<double>(gold.size());

    std::unordered_map<std::string, double> class_counts;
    std::unordered_map<int, double> cluster_counts;
    std::map<std::pair<std::string, int>, double> joint;
    for (size_t i = 0; i < gold.size(); ++i) {
        class_counts[gold[i]] += 1.0;
        cluster_counts[pred[i]] += 1.0;
        joint[{gold[i], pred[i]}] += 1.0;
    }

    auto entropy = [&](const auto& counts) {
        double h = 0.0;
        for (const auto& [_, c] : counts) {
            double p = c / n;
            h -= p * std::log(p);
        }
        return h;
    };
    double h_class = entropy(class_counts);
    double h_cluster = entropy(cluster_counts);

    // H(C|K) and H(K|C) from the joint distribution.
    double h_class_given_cluster = 0.0;
    double h_cluster_given_class = 0.0;
    for (const auto& [key, c] : joint) {
        double p_joint = c / n;
        double p_cluster = cluster_counts[key.second] / n;
        double p_class = class_counts[key.first] / n;
        h_class_given_cluster -= p_joint * std::log(p_joint / p_cluster);
        h_cluster_given_class -= p_joint * std::log(p_joint / p_class);
    }

    double homogeneity = h_class == 0.0 ? 1.0 : 1.0 - h_class_given_cluster / h_class;
    double completeness = h_cluster == 0.0 ? 1.0 : 1.0 - h_cluster_given_class / h_cluster;
    if (homogeneity + completeness == 0.0) return 0.0;
    return 2.0 * homogeneity * completeness / (homogeneity + completeness);
}

F1Result pair_f1(const std::set<std::pair<int, int>>& predicted,
                 const std::set<std::pair<int, int>>& gold) {
    size_t hit = 0;
    for (const auto& p : predicted)
        if (gold.count(p)) ++hit;
    F1Result r;
    r.precision = predicted.empty() ? 0.0 : static_cast<double>(hit) / predicted.size();
    r.recall = gold.empty() ? 0.0 : static_cast<double>(hit) / gold.size();
    r.f1 = (r.precision + r.recall) == 0.0
               ? 0.0
               : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

ThresholdResult best_threshold_ap(const std::vector<double>& sims,
                                  const std::vector<int>& labels) {
    if (sims.size() != labels.size())
        throw LengthMismatch("sims and labels differ in length");
    bool any0 = false, any1 = false;
    for (int l : labels) (l == 1 ? any1 : any0) = true;
    if (!any0 || !any1) throw OneClassOnly("both classes must be present");

    const size_t n = sims.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return sims[a] > sims[b]; });

    std::vector<int> ranked(n);
    for (size_t i = 0; i < n; ++i) ranked[i] = labels[order[i]];

    ThresholdResult out;
    out.ap = average_precision_ranked(ranked);

    std::vector<double> distinct = sims;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> candidates;
    candidates.push_back(-std::numeric_limits<double>::infinity());
    for (size_t i = 0; i + 1 < distinct.size(); ++i)
        candidates.push_back((distinct[i] + distinct[i + 1]) / 2.0);
    candidates.push_back(std::numeric_limits<double>::infinity());
    std::sort(candidates.begin(), candidates.end());

    double best_acc = -1.0;
    double best_thr = candidates.front();
    for (double thr : candidates) {
        size_t correct = 0;
        for (size_t i = 0; i < n; ++i) {
            int pred = sims[i] >= thr ? 1 : 0;
            if (pred == labels[i]) ++correct;
        }
        double acc = static_cast<double>(correct) / static_cast<double>(n);
        if (acc > best_acc) {
            best_acc = acc;
            best_thr = thr;
        }
    }
    out.best_accuracy = best_acc;
    out.threshold = best_thr;
    return out;
}

double accuracy(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
    if (pred.size() != gold.size()) throw LengthMismatch("accuracy inputs differ in length");
    if (pred.empty()) throw LengthMismatch("accuracy over empty input");
    size_t hit = 0;
    for (size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == gold[i]) ++hit;
    return static_cast<double>(hit) / static_cast<double>(pred.size());
}

double macro_ovr_ap(const std::vector<std::vector<double>>& class_scores,
                    const std::vector<size_t>& gold_class, size_t num_classes) {
    if (class_scores.size() != gold_class.size())
        throw LengthMismatch("scores and gold labels differ in length");
    const size_t n = gold_class.size();
    double sum = 0.0;
    size_t counted = 0;
    for (size_t c = 0; c < num_classes; ++c) {
        bool present = false;
        for (size_t i = 0; i < n; ++i)
            if (gold_class[i] == c) present = true;
        if (!present) continue;

        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return class_scores[a][c] > class_scores[b][c];
        });
        std::vector<int> ranked(n);
        for (size_t i = 0; i < n; ++i) ranked[i] = gold_class[order[i]] == c ? 1 : 0;
        sum += average_precision_ranked(ranked);
        ++counted;
    }
    if (counted == 0) throw NoPositives("no gold class present");
    return sum / static_cast<double>(counted);
}

double macro_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
    if (pred.size() != gold.size()) throw LengthMismatch("macro_f1 inputs differ in length");
    std::set<std::string> classes(gold.begin(), gold.end());
    double sum = 0.0;
    for (const auto& cls : classes) {
        size_t tp = 0, fp = 0, fn = 0;
        for (size_t i = 0; i < pred.size(); ++i) {
            bool p = pred[i] == cls, g = gold[i] == cls;
            if (p && g) ++tp;
            else if (p) ++fp;
            else if (g) ++fn;
        }
        double prec = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
        double rec = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
        sum += (prec + rec) == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
    }
    return sum / static_cast<double>(classes.size());
}

} // namespace embench
