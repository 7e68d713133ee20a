#include "lexdist/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "lexdist/errors.hpp"

namespace lexdist {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kForestFormat = "lexdist-forest";
constexpr const char* kLogisticFormat = "lexdist-logistic";
constexpr int kVersion = 1;

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

int infer_classes(const std::vector<int>& y, int requested) {
  int max_label = 0;
  for (int v : y) {
    if (v < 0) throw InputError("fit: negative class label");
    max_label = std::max(max_label, v);
  }
  int classes = requested > 0 ? requested : std::max(2, max_label + 1);
  if (max_label >= classes)
    throw InputError("fit: label " + std::to_string(max_label) + " outside " +
                     std::to_string(classes) + " classes");
  std::vector<int> seen(classes, 0);
  for (int v : y) seen[v] = 1;
  if (std::accumulate(seen.begin(), seen.end(), 0) < 2)
    throw InputError("fit: need at least 2 distinct classes in the training data");
  return classes;
}

// One greedy second-order tree on (gradient, hessian); leaf = -G/(H+lambda).
class TreeBuilder {
 public:
  TreeBuilder(const Eigen::Ref<const Eigen::MatrixXd>& x,
              const std::vector<std::vector<int>>& sorted, const Eigen::VectorXd& g,
              const Eigen::VectorXd& h, const BoostParams& p)
      : x_(x), sorted_(sorted), g_(g), h_(h), p_(p), in_node_(x.rows(), 0) {}

  RegressionTree build(std::vector<int> samples) {
    RegressionTree tree;
    grow(tree, std::move(samples), 0);
    return tree;
  }

 private:
  int grow(RegressionTree& tree, std::vector<int> samples, int depth) {
    double g_sum = 0, h_sum = 0;
    for (int i : samples) {
      g_sum += g_[i];
      h_sum += h_[i];
    }
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});

    double best_gain = 0;
    int best_feature = -1;
    double best_threshold = 0;
    const double parent_score = g_sum * g_sum / (h_sum + p_.lambda);

    if (depth < p_.max_depth && samples.size() >= 2) {
      for (int i : samples) in_node_[i] = 1;
      for (Eigen::Index f = 0; f < x_.cols(); ++f) {
        double gl = 0, hl = 0;
        int prev = -1;
        for (int i : sorted_[static_cast<std::size_t>(f)]) {
          if (!in_node_[i]) continue;
          if (prev >= 0 && x_(prev, f) < x_(i, f)) {
            const double gr = g_sum - gl, hr = h_sum - hl;
            if (hl >= p_.min_child_weight && hr >= p_.min_child_weight) {
              const double gain = gl * gl / (hl + p_.lambda) + gr * gr / (hr + p_.lambda) -
                                  parent_score;
              if (gain > best_gain + 1e-12) {
                best_gain = gain;
                best_feature = static_cast<int>(f);
                best_threshold = 0.5 * (x_(prev, f) + x_(i, f));
              }
            }
          }
          gl += g_[i];
          hl += h_[i];
          prev = i;
        }
      }
      for (int i : samples) in_node_[i] = 0;
    }

    if (best_feature < 0) {
      tree.nodes[node_id].value = -g_sum / (h_sum + p_.lambda);
      return node_id;
    }

    std::vector<int> left, right;
    for (int i : samples)
      (x_(i, best_feature) < best_threshold ? left : right).push_back(i);
    samples.clear();
    samples.shrink_to_fit();

    const int l = grow(tree, std::move(left), depth + 1);
    const int r = grow(tree, std::move(right), depth + 1);
    TreeNode& node = tree.nodes[node_id];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return node_id;
  }

  const Eigen::Ref<const Eigen::MatrixXd>& x_;
  const std::vector<std::vector<int>>& sorted_;
  const Eigen::VectorXd& g_;
  const Eigen::VectorXd& h_;
  const BoostParams& p_;
  std::vector<char> in_node_;
};

json tree_to_json(const RegressionTree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes)
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
  return nodes;
}

RegressionTree tree_from_json(const json& j) {
  RegressionTree t;
  for (const auto& n : j) {
    if (!n.is_array() || n.size() != 5) throw InputError("forest file: malformed tree node");
    t.nodes.push_back({n[0].get<int>(), n[1].get<double>(), n[2].get<int>(), n[3].get<int>(),
                       n[4].get<double>()});
  }
  if (t.nodes.empty()) throw InputError("forest file: empty tree");
  return t;
}

}  // namespace

double RegressionTree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    const TreeNode& n = nodes[node];
    if (n.feature >= x.size()) throw InputError("tree references feature beyond input size");
    node = x[n.feature] < n.threshold ? n.left : n.right;
  }
  return nodes[node].value;
}

int RegressionTree::depth() const {
  // nodes form a preorder tree; walk recursively
  struct Walk {
    const std::vector<TreeNode>& nodes;
    int at(int id) const {
      const TreeNode& n = nodes[id];
      if (n.feature < 0) return 0;
      return 1 + std::max(at(n.left), at(n.right));
    }
  };
  return Walk{nodes}.at(0);
}

Eigen::VectorXd BoostedForest::margins(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(classes_ == 0 ? 2 : classes_);
  for (const auto& round : trees_)
    for (std::size_t c = 0; c < round.size(); ++c)
      m[static_cast<Eigen::Index>(c)] += params_.learning_rate * round[c].predict(x);
  return m;
}

Prediction BoostedForest::predict_vector(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (n_features_ > 0 && x.size() != n_features_)
    throw InputError("predict: feature vector has size " + std::to_string(x.size()) +
                     ", forest expects " + std::to_string(n_features_));
  Prediction pred;
  pred.probabilities = softmax(margins(x));
  pred.probabilities.maxCoeff(&pred.label);
  return pred;
}

Prediction BoostedForest::predict(const PairFeatures& f) const {
  if (mask_ && !(f.mask == *mask_))
    throw InputError("predict: feature mask '" + f.mask.to_string() +
                     "' does not match training mask '" + mask_->to_string() + "'");
  return predict_vector(f.to_vector());
}

BoostedForest fit_boosted_vectors(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                  const std::vector<int>& y, const BoostParams& params,
                                  std::optional<FeatureMask> mask) {
  const int n = static_cast<int>(x.rows());
  if (n == 0 || static_cast<std::size_t>(n) != y.size())
    throw InputError("fit: empty data or label length mismatch");
  if (!x.allFinite()) throw InputError("fit: non-finite feature value");
  if (params.n_trees < 0 || params.max_depth < 1 || params.learning_rate <= 0)
    throw InputError("fit: invalid boosting parameters");
  const int classes = infer_classes(y, params.classes);

  BoostedForest forest(classes, static_cast<int>(x.cols()), params, mask);

  // global argsort per feature, ties broken by row index
  std::vector<std::vector<int>> sorted(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    auto& order = sorted[static_cast<std::size_t>(f)];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return x(a, f) != x(b, f) ? x(a, f) < x(b, f) : a < b;
    });
  }

  Eigen::MatrixXd margins = Eigen::MatrixXd::Zero(n, classes);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);

  auto log_loss = [&]() {
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd p = softmax(margins.row(i).transpose());
      acc -= std::log(std::max(p[y[i]], 1e-300));
    }
    return acc / n;
  };

  for (int round = 0; round < params.n_trees; ++round) {
    std::vector<RegressionTree> round_trees;
    round_trees.reserve(classes);
    Eigen::MatrixXd probs(n, classes);
    for (int i = 0; i < n; ++i) probs.row(i) = softmax(margins.row(i).transpose()).transpose();

    for (int c = 0; c < classes; ++c) {
      Eigen::VectorXd g(n), h(n);
      for (int i = 0; i < n; ++i) {
        const double p = probs(i, c);
        g[i] = p - (y[i] == c ? 1.0 : 0.0);
        h[i] = std::max(p * (1.0 - p), 1e-16);
      }
      TreeBuilder builder(x, sorted, g, h, params);
      round_trees.push_back(builder.build(all));
      for (int i = 0; i < n; ++i)
        margins(i, c) += params.learning_rate * round_trees.back().predict(x.row(i).transpose());
    }
    forest.trees_.push_back(std::move(round_trees));
    forest.train_log_loss_.push_back(log_loss());
  }
  return forest;
}

BoostedForest fit_boosted(const std::vector<std::pair<PairFeatures, int>>& data,
                          const BoostParams& params) {
  if (data.empty()) throw InputError("fit: no training examples");
  const FeatureMask mask = data.front().first.mask;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()), 4);
  std::vector<int> y;
  y.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i].first.mask == mask))
      throw InputError("fit: inconsistent feature masks in training data");
    x.row(static_cast<Eigen::Index>(i)) = data[i].first.to_vector().transpose();
    y.push_back(data[i].second);
  }
  return fit_boosted_vectors(x, y, params, mask);
}

void BoostedForest::save(const std::string& path, const std::string& run_config_json) const {
  json j;
  j["format"] = kForestFormat;
  j["version"] = kVersion;
  j["classes"] = classes_;
  j["n_features"] = n_features_;
  j["mask"] = mask_ ? json(mask_->to_string()) : json(nullptr);
  j["params"] = {{"n_trees", params_.n_trees},
                 {"max_depth", params_.max_depth},
                 {"learning_rate", params_.learning_rate},
                 {"lambda", params_.lambda},
                 {"min_child_weight", params_.min_child_weight},
                 {"seed", params_.seed}};
  json rounds = json::array();
  for (const auto& round : trees_) {
    json rt = json::array();
    for (const auto& t : round) rt.push_back(tree_to_json(t));
    rounds.push_back(std::move(rt));
  }
  j["trees"] = std::move(rounds);
  if (!run_config_json.empty()) j["run_config"] = json::parse(run_config_json);
  std::ofstream out(path);
  if (!out) throw InputError("cannot write forest file: " + path);
  out << j.dump() << '\n';
}

BoostedForest BoostedForest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open forest file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("corrupt forest file " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kForestFormat)
      throw InputError("not a forest file: " + path);
    if (j.at("version").get<int>() != kVersion)
      throw InputError("unsupported forest version in " + path);
    BoostParams params;
    const auto& p = j.at("params");
    params.n_trees = p.at("n_trees").get<int>();
    params.max_depth = p.at("max_depth").get<int>();
    params.learning_rate = p.at("learning_rate").get<double>();
    params.lambda = p.at("lambda").get<double>();
    params.min_child_weight = p.at("min_child_weight").get<double>();
    params.seed = p.at("seed").get<std::uint64_t>();
    std::optional<FeatureMask> mask;
    if (!j.at("mask").is_null()) mask = FeatureMask::from_string(j.at("mask").get<std::string>());
    BoostedForest forest(j.at("classes").get<int>(), j.at("n_features").get<int>(), params,
                         mask);
    for (const auto& round : j.at("trees")) {
      std::vector<RegressionTree> rt;
      for (const auto& t : round) rt.push_back(tree_from_json(t));
      if (static_cast<int>(rt.size()) != forest.classes())
        throw InputError("forest file: round with wrong tree count");
      forest.trees_.push_back(std::move(rt));
    }
    return forest;
  } catch (const json::exception& e) {
    throw InputError("corrupt forest file " + path + ": " + e.what());
  }
}

// --- logistic fallback ---

Prediction LogisticClassifier::predict_vector(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (w_.rows() == 0) throw InputError("predict: classifier not fitted");
  if (x.size() != w_.cols())
    throw InputError("predict: feature vector has size " + std::to_string(x.size()) +
                     ", classifier expects " + std::to_string(w_.cols()));
  Prediction pred;
  pred.probabilities = softmax(w_ * x + b_);
  pred.probabilities.maxCoeff(&pred.label);
  return pred;
}

Prediction LogisticClassifier::predict(const PairFeatures& f) const {
  if (mask_ && !(f.mask == *mask_))
    throw InputError("predict: feature mask '" + f.mask.to_string() +
                     "' does not match training mask '" + mask_->to_string() + "'");
  return predict_vector(f.to_vector());
}

LogisticClassifier fit_logistic(const std::vector<std::pair<PairFeatures, int>>& data,
                                const LogisticParams& params) {
  if (data.empty()) throw InputError("fit: no training examples");
  const int n = static_cast<int>(data.size());
  Eigen::MatrixXd x(n, 4);
  std::vector<int> y;
  y.reserve(data.size());
  const FeatureMask mask = data.front().first.mask;
  for (int i = 0; i < n; ++i) {
    if (!(data[static_cast<std::size_t>(i)].first.mask == mask))
      throw InputError("fit: inconsistent feature masks in training data");
    x.row(i) = data[static_cast<std::size_t>(i)].first.to_vector().transpose();
    y.push_back(data[static_cast<std::size_t>(i)].second);
  }
  const int classes = infer_classes(y, params.classes);

  LogisticClassifier clf;
  clf.w_ = Eigen::MatrixXd::Zero(classes, 4);
  clf.b_ = Eigen::VectorXd::Zero(classes);
  clf.mask_ = mask;

  for (int it = 0; it < params.iterations; ++it) {
    Eigen::MatrixXd gw = params.l2 * clf.w_;
    Eigen::VectorXd gb = Eigen::VectorXd::Zero(classes);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd p = softmax(clf.w_ * x.row(i).transpose() + clf.b_);
      p[y[static_cast<std::size_t>(i)]] -= 1.0;
      gw += (p / n) * x.row(i);
      gb += p / n;
    }
    clf.w_ -= params.learning_rate * gw;
    clf.b_ -= params.learning_rate * gb;
  }
  return clf;
}

void LogisticClassifier::save(const std::string& path, const std::string& run_config_json) const {
  json j;
  j["format"] = kLogisticFormat;
  j["version"] = kVersion;
  j["classes"] = classes();
  j["mask"] = mask_ ? json(mask_->to_string()) : json(nullptr);
  json w = json::array();
  for (Eigen::Index r = 0; r < w_.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < w_.cols(); ++c) row.push_back(w_(r, c));
    w.push_back(std::move(row));
  }
  j["w"] = std::move(w);
  json b = json::array();
  for (Eigen::Index r = 0; r < b_.size(); ++r) b.push_back(b_[r]);
  j["b"] = std::move(b);
  if (!run_config_json.empty()) j["run_config"] = json::parse(run_config_json);
  std::ofstream out(path);
  if (!out) throw InputError("cannot write classifier file: " + path);
  out << j.dump() << '\n';
}

LogisticClassifier LogisticClassifier::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open classifier file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("corrupt classifier file " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kLogisticFormat)
      throw InputError("not a logistic classifier file: " + path);
    if (j.at("version").get<int>() != kVersion)
      throw InputError("unsupported classifier version in " + path);
    LogisticClassifier clf;
    const int classes = j.at("classes").get<int>();
    const auto& w = j.at("w");
    if (static_cast<int>(w.size()) != classes) throw InputError("classifier file: bad shape");
    clf.w_.resize(classes, 4);
    for (int r = 0; r < classes; ++r) {
      const auto& row = w[static_cast<std::size_t>(r)];
      if (row.size() != 4) throw InputError("classifier file: bad shape");
      for (int c = 0; c < 4; ++c) clf.w_(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    const auto& b = j.at("b");
    if (static_cast<int>(b.size()) != classes) throw InputError("classifier file: bad shape");
    clf.b_.resize(classes);
    for (int r = 0; r < classes; ++r) clf.b_[r] = b[static_cast<std::size_t>(r)].get<double>();
    if (!j.at("mask").is_null())
      clf.mask_ = FeatureMask::from_string(j.at("mask").get<std::string>());
    return clf;
  } catch (const json::exception& e) {
    throw InputError("corrupt classifier file " + path + ": " + e.what());
  }
}

Prediction predict_any(const AnyClassifier& c, const PairFeatures& f) {
  return std::visit([&](const auto& m) { return m.predict(f); }, c);
}

void save_any(const AnyClassifier& c, const std::string& path,
              const std::string& run_config_json) {
  std::visit([&](const auto& m) { m.save(path, run_config_json); }, c);
}

AnyClassifier load_any(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open classifier file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("corrupt classifier file " + path + ": " + e.what());
  }
  const std::string format = j.value("format", "");
  if (format == kForestFormat) return BoostedForest::load(path);
  if (format == kLogisticFormat) return LogisticClassifier::load(path);
  throw InputError("unrecognized classifier format in " + path);
}

}  // namespace lexdist
