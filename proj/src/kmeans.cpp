#include "embench/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "embench/rng.hpp"

namespace embench {

namespace {

double sq_dist(const std::vector<double>& center, const std::vector<float>& p) {
    double acc = 0.0;
    for (size_t e = 0; e < center.size(); ++e) {
        double d = center[e] - static_cast<double>(p[e]);
        acc += d * d;
    }
    return acc;
}

using Centroids = std::vector<std::vector<double>>;

Centroids kmeanspp_init(const std::vector<EmbeddingVector>& points, size_t k, Rng& rng) {
    const size_t n = points.size();
    Centroids centroids;
    centroids.reserve(k);

    auto as_center = [](const EmbeddingVector& v) {
        return std::vector<double>(v.values.begin(), v.values.end());
    };

    centroids.push_back(as_center(points[rng.bounded(n)]));
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    while (centroids.size() < k) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            dist[i] = std::min(dist[i], sq_dist(centroids.back(), points[i].values));
            total += dist[i];
        }
        size_t pick;
        if (total == 0.0) {
            pick = rng.bounded(n);
        } else {
            double r = rng.uniform() * total;
            double run = 0.0;
            pick = n - 1;
            for (size_t i = 0; i < n; ++i) {
                run += dist[i];
                if (run >= r) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(as_center(points[pick]));
    }
    return centroids;
}

std::vector<int> assign_points(const std::vector<EmbeddingVector>& points,
                               const Centroids& centroids) {
    std::vector<int> assignment(points.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(points.size()); ++i) {
        const auto& p = points[static_cast<size_t>(i)].values;
        int best = 0;
        double best_d = sq_dist(centroids[0], p);
        for (size_t c = 1; c < centroids.size(); ++c) {
            double d = sq_dist(centroids[c], p);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        assignment[static_cast<size_t>(i)] = best;
    }
    return assignment;
}

KMeansResult kmeans_once(const std::vector<EmbeddingVector>& points, size_t k, Rng& rng,
                         const KMeansConfig& config) {
    const size_t n = points.size();
    const size_t dim = points.front().dim();
    Centroids centroids = kmeanspp_init(points, k, rng);

    std::vector<int> assignment;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        assignment = assign_points(points, centroids);

        // Refill empty clusters with the point farthest from its centroid
        // (ties to the lowest point index), lowest cluster index first.
        std::vector<size_t> sizes(k, 0);
        for (int a : assignment) ++sizes[static_cast<size_t>(a)];
        for (size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            double far_d = -1.0;
            size_t far_i = 0;
            for (size_t i = 0; i < n; ++i) {
                size_t owner = static_cast<size_t>(assignment[i]);
                if (sizes[owner] <= 1) continue;
                double d = sq_dist(centroids[owner], points[i].values);
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            --sizes[static_cast<size_t>(assignment[far_i])];
            assignment[far_i] = static_cast<int>(c);
            ++sizes[c];
        }

        Centroids next(k, std::vector<double>(dim, 0.0));
        for (size_t i = 0; i < n; ++i) {
            auto& center = next[static_cast<size_t>(assignment[i])];
            for (size_t e = 0; e < dim; ++e)
                center[e] += static_cast<double>(points[i].values[e]);
        }
        for (size_t c = 0; c < k; ++c)
            for (size_t e = 0; e < dim; ++e)
                next[c][e] /= static_cast<double>(sizes[c]);

        double shift = 0.0;
        for (size_t c = 0; c < k; ++c) {
            double acc = 0.0;
            for (size_t e = 0; e < dim; ++e) {
                double d = next[c][e] - centroids[c][e];
                acc += d * d;
            }
            shift = std::max(shift, std::sqrt(acc));
        }
        centroids = std::move(next);
        if (shift < config.tolerance) break;
    }

    // Final labeling: plain nearest-centroid assignment, no empty-cluster fix.
    KMeansResult result;
    result.assignment = assign_points(points, centroids);
    for (size_t i = 0; i < n; ++i)
        result.sse += sq_dist(centroids[static_cast<size_t>(result.assignment[i])],
                              points[i].values);
    return result;
}

} // namespace

KMeansResult kmeans(const std::vector<EmbeddingVector>& points, size_t k, uint64_t seed,
                    const KMeansConfig& config) {
    if (k == 0) throw ValidationError("kmeans requires k >= 1");
    if (points.size() < k)
        throw FewerPointsThanClusters("have " + std::to_string(points.size()) +
                                      " points for k=" + std::to_string(k));

    KMeansResult best;
    bool first = true;
    for (int r = 0; r < config.restarts; ++r) {
        Rng rng(mix_seed(seed, static_cast<uint64_t>(r)));
        KMeansResult run = kmeans_once(points, k, rng, config);
        if (first || run.sse < best.sse) {
            best = std::move(run);
            first = false;
        }
    }
    return best;
}

} // namespace embench
