#pragma once
// Deterministic k-means for the clustering evaluator: seeded k-means++
// initialization, assignment ties to the lowest centroid index, empty
// clusters refilled with the point farthest from its centroid, and a final
// plain nearest-centroid labeling after convergence. Restarts keep the
// lowest within-cluster SSE.

#include <cstdint>
#include <vector>

#include "embench/model.hpp"

namespace embench {

struct KMeansConfig {
    int restarts = 10;
    int max_iterations = 300;
    double tolerance = 1e-6;  // max centroid shift that counts as converged
};

struct KMeansResult {
    std::vector<int> assignment;
    double sse = 0.0;
};

// Assignment is parallel across points (OpenMP) but bitwise deterministic:
// every per-point decision is independent and the reductions run serially.
// Throws FewerPointsThanClusters.
KMeansResult kmeans(const std::vector<EmbeddingVector>& points, size_t k, uint64_t seed,
                    const KMeansConfig& config = {});

} // namespace embench
