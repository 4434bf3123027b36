#include "embench/probe.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace embench {

ClassifierModel::ClassifierModel(std::vector<std::string> classes, size_t dim)
    : classes_(std::move(classes)),
      dim_(dim),
      weights_(classes_.size(), std::vector<double>(dim, 0.0)),
      bias_(classes_.size(), 0.0) {}

std::vector<double> ClassifierModel::predict_proba(const EmbeddingVector& x) const {
    if (x.dim() != dim_)
        throw DimensionMismatch("probe expects dim " + std::to_string(dim_));
    const size_t c = classes_.size();
    std::vector<double> logits(c);
    for (size_t j = 0; j < c; ++j) {
        double z = bias_[j];
        for (size_t e = 0; e < dim_; ++e)
            z += weights_[j][e] * static_cast<double>(x.values[e]);
        logits[j] = z;
    }
    double zmax = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& z : logits) {
        z = std::exp(z - zmax);
        sum += z;
    }
    for (double& z : logits) z /= sum;
    return logits;
}

const std::string& ClassifierModel::predict(const EmbeddingVector& x) const {
    auto proba = predict_proba(x);
    size_t best = 0;
    for (size_t j = 1; j < proba.size(); ++j)
        if (proba[j] > proba[best]) best = j;
    return classes_[best];
}

ClassifierModel train_linear_classifier(
    const std::vector<std::pair<EmbeddingVector, std::string>>& train,
    const ProbeConfig& config, uint64_t /*seed*/) {
    if (train.empty()) throw SingleClass("no training examples");

    std::set<std::string> label_set;
    for (const auto& [_, label] : train) label_set.insert(label);
    if (label_set.size() < 2) throw SingleClass("training data has fewer than two classes");

    std::vector<std::string> classes(label_set.begin(), label_set.end());
    const size_t c = classes.size();
    const size_t dim = train.front().first.dim();
    const size_t n = train.size();

    std::vector<size_t> y(n);
    for (size_t i = 0; i < n; ++i) {
        if (train[i].first.dim() != dim) throw DimensionMismatch("inconsistent feature dims");
        y[i] = static_cast<size_t>(
            std::lower_bound(classes.begin(), classes.end(), train[i].second) - classes.begin());
    }

    ClassifierModel model(classes, dim);
    std::vector<std::vector<double>> grad_w(c, std::vector<double>(dim));
    std::vector<double> grad_b(c);
    std::vector<double> logits(c);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double progress = config.epochs <= 1
                              ? 0.0
                              : static_cast<double>(epoch) / static_cast<double>(config.epochs);
        double lr = config.lr_end +
                    (config.lr_start - config.lr_end) * 0.5 * (1.0 + std::cos(M_PI * progress));

        for (auto& row : grad_w) std::fill(row.begin(), row.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);

        for (size_t i = 0; i < n; ++i) {
            const auto& x = train[i].first.values;
            for (size_t j = 0; j < c; ++j) {
                double z = model.bias_[j];
                for (size_t e = 0; e < dim; ++e)
                    z += model.weights_[j][e] * static_cast<double>(x[e]);
                logits[j] = z;
            }
            double zmax = *std::max_element(logits.begin(), logits.end());
            double sum = 0.0;
            for (double& z : logits) {
                z = std::exp(z - zmax);
                sum += z;
            }
            for (size_t j = 0; j < c; ++j) {
                double err = logits[j] / sum - (y[i] == j ? 1.0 : 0.0);
                grad_b[j] += err;
                for (size_t e = 0; e < dim; ++e)
                    grad_w[j][e] += err * static_cast<double>(x[e]);
            }
        }

        const double inv_n = 1.0 / static_cast<double>(n);
        for (size_t j = 0; j < c; ++j) {
            model.bias_[j] -= lr * grad_b[j] * inv_n;
            for (size_t e = 0; e < dim; ++e) {
                double g = grad_w[j][e] * inv_n + config.l2 * model.weights_[j][e];
                model.weights_[j][e] -= lr * g;
            }
        }
    }
    return model;
}

} // namespace embench
