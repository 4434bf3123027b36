#pragma once
// Multinomial logistic probe for the classification evaluator. Deterministic:
// zero-initialized weights, full-batch gradient descent on softmax cross
// entropy with L2 penalty, fixed cosine learning-rate schedule 0.5 -> 0.01.

#include <cstdint>
#include <string>
#include <vector>

#include "embench/model.hpp"

namespace embench {

struct ProbeConfig {
    double l2 = 1e-4;
    int epochs = 500;
    double lr_start = 0.5;
    double lr_end = 0.01;
};

class ClassifierModel {
public:
    // One weight row per class over dim features plus an unregularized bias.
    ClassifierModel(std::vector<std::string> classes, size_t dim);

    // Class probabilities (softmax), aligned with classes().
    std::vector<double> predict_proba(const EmbeddingVector& x) const;
    const std::string& predict(const EmbeddingVector& x) const;
    const std::vector<std::string>& classes() const { return classes_; }

private:
    friend ClassifierModel train_linear_classifier(
        const std::vector<std::pair<EmbeddingVector, std::string>>&, const ProbeConfig&,
        uint64_t);
    std::vector<std::string> classes_;
    size_t dim_;
    std::vector<std::vector<double>> weights_;  // [class][feature]
    std::vector<double> bias_;
};

// Throws SingleClass when fewer than two classes appear. The class order is
// the sorted label set, so results do not depend on input order beyond the
// example sequence itself. seed is accepted for interface stability; the
// solver has no stochastic step.
ClassifierModel train_linear_classifier(
    const std::vector<std::pair<EmbeddingVector, std::string>>& train,
    const ProbeConfig& config = {}, uint64_t seed = 0);

} // namespace embench
