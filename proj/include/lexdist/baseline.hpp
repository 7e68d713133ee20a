#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lexdist/dataset.hpp"
#include "lexdist/embedding.hpp"

namespace lexdist {

struct PivotSet {
  Eigen::MatrixXd pivots;  // k x d
  Eigen::Index k() const { return pivots.rows(); }
  std::vector<double> objective_trace;  // within-cluster SSE per Lloyd iteration
};

// Lloyd k-means with k-means++ seeding over {vec(a) - vec(b)} of the train
// pairs (antonym and synonym differences clustered jointly). Converges when
// assignments stabilize or after 300 iterations.
PivotSet fit_pivots(const std::vector<LabeledPair>& train_pairs, EmbeddingTable& table, int k,
                    std::uint64_t seed);

// Generic k-means over row vectors; exposed for direct testing.
PivotSet kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, int k, Rng& rng,
                int max_iters = 300);

// [cos(a,b); euclidean distance of (vec(a)-vec(b)) to each pivot; vec(a)-vec(b)]
// Length 1 + k + d. Not symmetric: the difference block flips sign on swap.
Eigen::VectorXd baseline_features(const LabeledPair& pair, EmbeddingTable& table,
                                  const PivotSet& pivots, Rng& rng);

}  // namespace lexdist
