#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexdist/classifier.hpp"
#include "lexdist/dataset.hpp"
#include "lexdist/distiller.hpp"
#include "lexdist/embedding.hpp"
#include "lexdist/features.hpp"
#include "lexdist/metrics.hpp"

namespace lexdist {

struct EvalReport {
  int classes = 2;
  std::map<Category, CategoryReport> per_category;
  CategoryReport overall;
  std::string feature_mask;
  std::string embedding_source;
  int primary_class = class_index(Relation::antonym);

  std::string to_json_string() const;
  std::string to_text_table() const;
};

using PairPredictor = std::function<Prediction(const PairFeatures&)>;

// Builds features for every test pair, predicts, and aggregates metrics per
// category and overall. When train_pairs is given, test/train disjointness
// (as unordered pairs) is asserted first.
EvalReport evaluate(const PairPredictor& predictor, const DistillerModel& model,
                    EmbeddingTable& table, const std::vector<LabeledPair>& test_pairs,
                    const FeatureMask& mask, Rng& rng,
                    const std::vector<LabeledPair>* train_pairs = nullptr);

EvalReport evaluate(const BoostedForest& forest, const DistillerModel& model,
                    EmbeddingTable& table, const std::vector<LabeledPair>& test_pairs,
                    const FeatureMask& mask, Rng& rng,
                    const std::vector<LabeledPair>* train_pairs = nullptr);

void write_report(const EvalReport& report, const std::string& json_path,
                  const std::string& text_path);

enum class Subspace { SYN, ANT };

struct Neighbor {
  std::string word;
  double score;
};

// Exhaustive scan of the vocabulary in the requested distilled sub-space.
// The query word is excluded; ties break lexicographically. Requests past
// |V|-1 are truncated (truncated flag set).
struct NeighborResult {
  std::vector<Neighbor> neighbors;
  bool truncated = false;
};

NeighborResult neighbors(const DistillerModel& model, EmbeddingTable& table,
                         const std::string& word, Subspace space, int top_k, Rng& rng);

}  // namespace lexdist
