#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "lexdist/dataset.hpp"
#include "lexdist/distiller.hpp"
#include "lexdist/embedding.hpp"

namespace lexdist {

// Negation prefixes from prior work on antonymy cues.
inline constexpr std::array<const char*, 14> kNegationPrefixes = {
    "de", "a", "un", "non", "in", "ir", "anti", "il", "dis", "counter", "im", "an", "sub", "ab"};

// 1 iff a == p+b or b == p+a for some negation prefix p (raw surface forms,
// exact concatenation).
int prefix_feature(const std::string& a, const std::string& b);

struct FeatureMask {
  bool distiller = true;
  bool distributional = true;
  bool prefix = true;

  bool operator==(const FeatureMask&) const = default;
  bool any() const { return distiller || distributional || prefix; }
  std::string to_string() const;
  static FeatureMask from_string(const std::string& s);
};

// Phase-II feature vector of one word pair; disabled components are zeroed
// and the mask travels with the features. Every component is symmetric under
// swapping the pair.
struct PairFeatures {
  double synonymy = 0;
  double antonymy = 0;
  double distributional = 0;
  int prefix = 0;
  FeatureMask mask;

  Eigen::Vector4d to_vector() const {
    return {synonymy, antonymy, distributional, static_cast<double>(prefix)};
  }
};

// OOV words are random-initialized into the table on the fly.
PairFeatures build_features(const DistillerModel& model, EmbeddingTable& table,
                            const std::string& a, const std::string& b,
                            const FeatureMask& mask, Rng& rng);

// TSV dump (word_a, word_b, synonymy, antonymy, distributional, prefix, label)
// for offline inspection and classifier training.
void dump_features(const std::vector<LabeledPair>& pairs,
                   const std::vector<PairFeatures>& features, const std::string& path);

}  // namespace lexdist
