#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lexdist/features.hpp"

namespace lexdist {

struct Prediction {
  int label = 0;
  Eigen::VectorXd probabilities;  // sums to 1
};

// --- gradient-boosted regression trees, multinomial log-loss ---

struct TreeNode {
  int feature = -1;  // -1: leaf
  double threshold = 0;
  int left = -1, right = -1;
  double value = 0;  // leaf weight
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  int depth() const;
};

struct BoostParams {
  int n_trees = 200;  // boosting rounds; one tree per class per round
  int max_depth = 4;
  double learning_rate = 0.1;
  double lambda = 1.0;            // L2 on leaf weights
  double min_child_weight = 1e-3;
  int classes = 0;  // 0: infer from labels
  std::uint64_t seed = 42;
};

// Axis-aligned trees fit on second-order gradients of the softmax log-loss,
// exact greedy splits, no subsampling. Prediction is softmax over summed
// leaf margins; an empty forest predicts uniform probabilities.
class BoostedForest {
 public:
  BoostedForest() = default;
  BoostedForest(int classes, int n_features, BoostParams params,
                std::optional<FeatureMask> mask)
      : classes_(classes), n_features_(n_features), params_(params), mask_(mask) {}

  int classes() const { return classes_; }
  int n_features() const { return n_features_; }
  const BoostParams& params() const { return params_; }
  const std::optional<FeatureMask>& mask() const { return mask_; }
  int rounds() const { return static_cast<int>(trees_.size()); }
  const std::vector<std::vector<RegressionTree>>& trees() const { return trees_; }

  Eigen::VectorXd margins(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Prediction predict_vector(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // Pair-classification entry point; rejects a mask that differs from the
  // one the forest was trained with.
  Prediction predict(const PairFeatures& f) const;

  // Training log-loss after each boosting round (non-increasing).
  const std::vector<double>& train_log_loss() const { return train_log_loss_; }

  void save(const std::string& path, const std::string& run_config_json = "") const;
  static BoostedForest load(const std::string& path);

  friend BoostedForest fit_boosted_vectors(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                           const std::vector<int>& y, const BoostParams& params,
                                           std::optional<FeatureMask> mask);

 private:
  int classes_ = 0;
  int n_features_ = 0;
  BoostParams params_;
  std::optional<FeatureMask> mask_;
  std::vector<std::vector<RegressionTree>> trees_;  // [round][class]
  std::vector<double> train_log_loss_;
};

// Generic fit over feature rows; used directly by the Direct baseline.
BoostedForest fit_boosted_vectors(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                  const std::vector<int>& y, const BoostParams& params,
                                  std::optional<FeatureMask> mask = std::nullopt);

// Pair-classifier fit over the 4 Phase-II features.
BoostedForest fit_boosted(const std::vector<std::pair<PairFeatures, int>>& data,
                          const BoostParams& params);

// --- multinomial logistic regression fallback (same interface) ---

struct LogisticParams {
  int iterations = 2000;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  int classes = 0;
};

class LogisticClassifier {
 public:
  LogisticClassifier() = default;

  int classes() const { return static_cast<int>(w_.rows()); }
  const std::optional<FeatureMask>& mask() const { return mask_; }

  Prediction predict_vector(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Prediction predict(const PairFeatures& f) const;

  void save(const std::string& path, const std::string& run_config_json = "") const;
  static LogisticClassifier load(const std::string& path);

  friend LogisticClassifier fit_logistic(const std::vector<std::pair<PairFeatures, int>>& data,
                                         const LogisticParams& params);

 private:
  Eigen::MatrixXd w_;  // classes x 4
  Eigen::VectorXd b_;
  std::optional<FeatureMask> mask_;
};

LogisticClassifier fit_logistic(const std::vector<std::pair<PairFeatures, int>>& data,
                                const LogisticParams& params);

// Either classifier behind one value type.
using AnyClassifier = std::variant<BoostedForest, LogisticClassifier>;

Prediction predict_any(const AnyClassifier& c, const PairFeatures& f);
void save_any(const AnyClassifier& c, const std::string& path,
              const std::string& run_config_json = "");
AnyClassifier load_any(const std::string& path);

}  // namespace lexdist
