#pragma once

#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lexdist/dataset.hpp"
#include "lexdist/embedding.hpp"

namespace lexdist::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lexdist-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

  std::string write(const std::string& name, const std::string& content) const {
    auto p = path_ / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }

 private:
  std::filesystem::path path_;
};

// Synthetic relation task: `clusters` clusters of `cluster_size` words each.
// All within-cluster pairs are synonyms. Clusters are paired off (0,1),
// (2,3), ... and the designated antonym links between paired clusters are
// the cross pairs (x_i, y_j) with (i+j) % 3 != 2, so a third of the
// conceptual antonym pairs are never trained on.
struct PlantedTask {
  std::vector<std::string> words;
  std::vector<LabeledPair> pairs;     // all labeled pairs
  DatasetSplit split;                 // shuffled 80/20 train/test
  std::vector<std::array<std::string, 3>> triples;  // (a,b) antonym-train, (b,c) synonym-train
  std::vector<std::pair<std::string, std::string>> unrelated;  // sampled non-pairs
  int clusters = 10;
  int cluster_size = 6;

  int cluster_of(const std::string& w) const {
    return std::stoi(w.substr(1, w.find('_') - 1));
  }
};

inline PlantedTask make_planted_task(std::uint64_t seed, int clusters = 10,
                                     int cluster_size = 6, double test_fraction = 0.2) {
  PlantedTask task;
  task.clusters = clusters;
  task.cluster_size = cluster_size;
  auto word = [&](int c, int i) { return "w" + std::to_string(c) + "_" + std::to_string(i); };

  for (int c = 0; c < clusters; ++c)
    for (int i = 0; i < cluster_size; ++i) task.words.push_back(word(c, i));

  for (int c = 0; c < clusters; ++c)
    for (int i = 0; i < cluster_size; ++i)
      for (int j = i + 1; j < cluster_size; ++j)
        task.pairs.push_back({word(c, i), word(c, j), Relation::synonym, Category::unspecified});

  for (int c = 0; c + 1 < clusters; c += 2)
    for (int i = 0; i < cluster_size; ++i)
      for (int j = 0; j < cluster_size; ++j)
        if ((i + j) % 3 != 2)
          task.pairs.push_back(
              {word(c, i), word(c + 1, j), Relation::antonym, Category::unspecified});

  Rng rng = make_rng(seed, "planted-split");
  std::vector<LabeledPair> shuffled = task.pairs;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const std::size_t n_test = static_cast<std::size_t>(shuffled.size() * test_fraction);
  task.split.test.assign(shuffled.begin(), shuffled.begin() + n_test);
  task.split.train.assign(shuffled.begin() + n_test, shuffled.end());
  task.split.finalize();

  // Trans-transitivity probes from train pairs only.
  std::set<std::pair<std::string, std::string>> syn_train;
  for (const auto& p : task.split.train)
    if (p.relation == Relation::synonym) {
      syn_train.emplace(p.word_a, p.word_b);
      syn_train.emplace(p.word_b, p.word_a);
    }
  for (const auto& p : task.split.train) {
    if (p.relation != Relation::antonym) continue;
    for (int k = 0; k < cluster_size; ++k) {
      const std::string c = word(task.cluster_of(p.word_b), k);
      if (c != p.word_b && syn_train.count({p.word_b, c}))
        task.triples.push_back({p.word_a, p.word_b, c});
    }
  }

  // Unrelated probes: clusters neither equal nor paired opposite.
  Rng urng = make_rng(seed, "planted-unrelated");
  std::uniform_int_distribution<int> pick(0, static_cast<int>(task.words.size()) - 1);
  while (task.unrelated.size() < 500) {
    const std::string& a = task.words[static_cast<std::size_t>(pick(urng))];
    const std::string& b = task.words[static_cast<std::size_t>(pick(urng))];
    const int ca = task.cluster_of(a), cb = task.cluster_of(b);
    if (ca == cb || (ca / 2) == (cb / 2)) continue;
    task.unrelated.emplace_back(a, b);
  }
  return task;
}

// Random input vectors for the planted vocabulary, at the unit-ish scale of
// real pre-trained embeddings (the table's own OOV range of +-0.5/d leaves
// 50d words numerically indistinguishable).
inline EmbeddingTable planted_embeddings(const PlantedTask& task, Eigen::Index dim,
                                         std::uint64_t seed) {
  EmbeddingTable table(dim);
  Rng rng = make_rng(seed, "planted-vectors");
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  Eigen::RowVectorXd v(dim);
  for (const auto& w : task.words) {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = unit(rng);
    table.insert(w, v);
  }
  table.set_seed(seed);
  return table;
}

}  // namespace lexdist::testing
