#include "lexdist/baseline.hpp"

#include <limits>
#include <vector>

#include "lexdist/errors.hpp"

namespace lexdist {

namespace {

// k-means++ seeding: first center uniform, then squared-distance weighted.
Eigen::MatrixXd seed_centers(const Eigen::Ref<const Eigen::MatrixXd>& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  std::uniform_int_distribution<Eigen::Index> uniform(0, n - 1);
  centers.row(0) = points.row(uniform(rng));

  Eigen::VectorXd min_sq = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = min_sq.sum();
    Eigen::Index chosen = 0;
    if (total > 0) {
      std::uniform_real_distribution<double> unit(0.0, total);
      double target = unit(rng);
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= min_sq[i];
        if (target <= 0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = uniform(rng);  // all points coincide with some center
    }
    centers.row(c) = points.row(chosen);
    min_sq = min_sq.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

}  // namespace

PivotSet kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, int k, Rng& rng,
                int max_iters) {
  if (k < 1) throw InputError("kmeans: k must be >= 1");
  if (points.rows() < k)
    throw InputError("kmeans: k=" + std::to_string(k) + " exceeds sample count " +
                     std::to_string(points.rows()));

  PivotSet result;
  result.pivots = seed_centers(points, k, rng);
  const Eigen::Index n = points.rows();
  std::vector<int> assign(static_cast<std::size_t>(n), -1);

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double sse = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - result.pivots.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      sse += best_d;
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    result.objective_trace.push_back(sse);
    if (!changed) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        result.pivots.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
    // empty clusters keep their previous center
  }
  return result;
}

PivotSet fit_pivots(const std::vector<LabeledPair>& train_pairs, EmbeddingTable& table, int k,
                    std::uint64_t seed) {
  if (train_pairs.empty()) throw InputError("fit_pivots: no training pairs");
  if (k > static_cast<int>(train_pairs.size()))
    throw InputError("fit_pivots: k=" + std::to_string(k) + " exceeds pair count " +
                     std::to_string(train_pairs.size()));
  Rng oov_rng = make_rng(seed, "baseline-oov");
  Eigen::MatrixXd diffs(static_cast<Eigen::Index>(train_pairs.size()), table.dim());
  for (std::size_t i = 0; i < train_pairs.size(); ++i) {
    Eigen::RowVectorXd va = table.lookup_or_init(train_pairs[i].word_a, oov_rng);
    Eigen::RowVectorXd vb = table.lookup_or_init(train_pairs[i].word_b, oov_rng);
    diffs.row(static_cast<Eigen::Index>(i)) = va - vb;
  }
  Rng rng = make_rng(seed, "baseline-kmeans");
  return kmeans(diffs, k, rng);
}

Eigen::VectorXd baseline_features(const LabeledPair& pair, EmbeddingTable& table,
                                  const PivotSet& pivots, Rng& rng) {
  if (pivots.pivots.cols() != table.dim())
    throw InputError("baseline_features: pivot dimension " +
                     std::to_string(pivots.pivots.cols()) + " does not match table dimension " +
                     std::to_string(table.dim()));
  Eigen::RowVectorXd va = table.lookup_or_init(pair.word_a, rng);
  Eigen::RowVectorXd vb = table.lookup_or_init(pair.word_b, rng);
  Eigen::RowVectorXd diff = va - vb;

  Eigen::VectorXd out(1 + pivots.k() + table.dim());
  out[0] = cosine(va.transpose(), vb.transpose());
  for (Eigen::Index c = 0; c < pivots.k(); ++c)
    out[1 + c] = (diff - pivots.pivots.row(c)).norm();
  out.tail(table.dim()) = diff.transpose();
  return out;
}

}  // namespace lexdist
