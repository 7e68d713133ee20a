#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lexdist/rng.hpp"

namespace lexdist {

// Vocabulary plus dense vectors loaded from a pre-trained embedding file.
// Rows are appended in insertion order; a word maps to exactly one row.
// After loading, the only permitted mutation is OOV insertion through
// lookup_or_init (single writer); the table is then shareable read-only.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(Eigen::Index dim) : dim_(dim) {}

  Eigen::Index dim() const { return dim_; }
  Eigen::Index size() const { return rows_; }

  bool contains(const std::string& word) const { return index_.count(word) > 0; }

  // Row index of a stored word, or -1.
  Eigen::Index find(const std::string& word) const;

  const std::string& word_at(Eigen::Index row) const { return words_[static_cast<std::size_t>(row)]; }

  Eigen::Ref<const Eigen::RowVectorXd> row(Eigen::Index i) const { return vectors_.row(i); }

  // Stored vector if present, otherwise a fresh row drawn uniformly from
  // [-0.5/d, 0.5/d] per component, inserted and remembered in oov_seeded.
  // Repeated calls return the same vector. Returned by value: insertions can
  // relocate row storage.
  Eigen::RowVectorXd lookup_or_init(const std::string& word, Rng& rng);

  // Appends a row for a new word. Throws if the word already exists or the
  // vector dimension disagrees.
  Eigen::Index insert(const std::string& word, const Eigen::RowVectorXd& vec);

  const std::vector<std::string>& words() const { return words_; }
  const std::unordered_set<std::string>& oov_seeded() const { return oov_seeded_; }

  // Contiguous view over all stored rows.
  Eigen::Ref<const Eigen::MatrixXd> matrix() const { return vectors_.topRows(rows_); }

  std::optional<std::uint64_t> seed() const { return seed_; }
  void set_seed(std::uint64_t s) { seed_ = s; }

  // Number of duplicate lines skipped at load time (first occurrence wins).
  int duplicates_skipped = 0;

 private:
  friend EmbeddingTable load_embeddings(const std::string&, std::optional<Eigen::Index>);

  void reserve_row();

  Eigen::Index dim_ = 0;
  Eigen::Index rows_ = 0;
  Eigen::MatrixXd vectors_;  // capacity-doubling storage, top rows_ valid
  std::vector<std::string> words_;
  std::unordered_map<std::string, Eigen::Index> index_;
  std::unordered_set<std::string> oov_seeded_;
  std::optional<std::uint64_t> seed_;
};

// Parses `word v1 ... vd` lines (space or tab separated). A first line of
// exactly two integer tokens is treated as a word2vec-style header and
// skipped. Duplicate words keep the first occurrence. Errors carry the
// offending line number.
EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<Eigen::Index> expected_dim = std::nullopt);

// Writes the table in the input text format, plus `<path>.meta.json` with
// dim, seed (when known) and the OOV-seeded word list. Round-trips bit-exactly.
void save_embeddings(const EmbeddingTable& table, const std::string& path);

// Table of i.i.d. uniform [-0.5/d, 0.5/d] vectors, deterministic per seed.
EmbeddingTable make_random_table(const std::vector<std::string>& words, Eigen::Index d,
                                 std::uint64_t seed);

// <u,v>/(|u||v|); 0 when either norm is below 1e-12. Symmetric bit-for-bit.
double cosine(const Eigen::Ref<const Eigen::VectorXd>& u,
              const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace lexdist
