#pragma once
// Scalar metric implementations for all task families. Everything is a pure
// function; values live in their natural range ([0,1] or [-1,1]) and are
// scaled x100 only at report-render time.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "embench/errors.hpp"

namespace embench {

struct MetricValue {
    std::string name;
    double value = 0.0;
};

// DCG@k with linear gain rel/log2(rank+1), normalized by the ideal DCG over
// the judged relevances. Throws NoRelevantDocs when rels has no positive.
double ndcg_at_k(const std::vector<std::string>& ranking,
                 const std::map<std::string, int>& rels, size_t k);

// Fraction of positively judged docs appearing in the top k of the ranking.
double recall_at_k(const std::vector<std::string>& ranking,
                   const std::map<std::string, int>& rels, size_t k);

// 1/rank of the first relevant doc within the top k, 0 when none appears.
double mrr_at_k(const std::vector<std::string>& ranking,
                const std::map<std::string, int>& rels, size_t k);

// AP over a binary ranking: (1/P) sum over positive positions of
// positives_so_far/position. Throws NoPositives.
double average_precision_ranked(const std::vector<int>& ranking);

// Pearson correlation of fractional (average) ranks; ties get the mean of
// their rank positions. Throws LengthMismatch / DegenerateInput.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Harmonic mean of homogeneity and completeness, entropies in natural log.
// h (resp. c) is 1 by convention when the class (resp. cluster) entropy is 0.
double v_measure(const std::vector<std::string>& gold, const std::vector<int>& pred);

struct F1Result {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};
F1Result pair_f1(const std::set<std::pair<int, int>>& predicted,
                 const std::set<std::pair<int, int>>& gold);

struct ThresholdResult {
    double ap = 0.0;
    double best_accuracy = 0.0;
    double threshold = 0.0;  // may be +-infinity at the sentinel candidates
};
// AP over labels ranked by similarity descending (ties by ascending index),
// plus the accuracy-maximizing threshold over midpoints of adjacent distinct
// sims with +-infinity sentinels (smallest candidate wins ties).
ThresholdResult best_threshold_ap(const std::vector<double>& sims,
                                  const std::vector<int>& labels);

double accuracy(const std::vector<std::string>& pred, const std::vector<std::string>& gold);

// Macro one-vs-rest AP over classes: per class, AP of the ranking by that
// class's score (ties by index). Classes absent from gold are skipped.
double macro_ovr_ap(const std::vector<std::vector<double>>& class_scores,
                    const std::vector<size_t>& gold_class,
                    size_t num_classes);

double macro_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold);

} // namespace embench
