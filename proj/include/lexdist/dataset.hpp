#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lexdist/rng.hpp"

namespace lexdist {

enum class Relation { synonym, antonym, irrelevant };
enum class Category { noun, verb, adjective, unspecified };

const char* to_string(Relation r);
const char* to_string(Category c);
Relation relation_from_string(const std::string& s);  // also accepts "0"/"1"
Category category_from_string(const std::string& s);

struct LabeledPair {
  std::string word_a;
  std::string word_b;
  Relation relation = Relation::synonym;
  Category category = Category::unspecified;

  bool operator==(const LabeledPair&) const = default;
};

struct DatasetSplit {
  std::vector<LabeledPair> train;
  std::vector<LabeledPair> dev;
  std::vector<LabeledPair> test;
  std::vector<std::string> vocab;  // sorted unique words of train

  // Recomputes vocab from train and checks the splits are pairwise disjoint
  // as unordered pairs.
  void finalize();
};

// Tab-separated `word_a  word_b  label` lines; labels are case-insensitive
// synonym/antonym/irrelevant, with 0=synonym / 1=antonym accepted for
// published splits. Malformed lines raise InputError with the line number.
std::vector<LabeledPair> load_pairs(const std::string& path, Category category);

// 5-column variant `word_a  word_b  label  category  split`; returns the
// assembled splits. 3-column files are rejected here (no split information).
DatasetSplit load_split_file(const std::string& path);

// Directory layout `<category>.{train,dev,test}.tsv`. With Category::
// unspecified, all three category prefixes are loaded and merged.
DatasetSplit load_split_dir(const std::string& dir, Category category);

// Adds the swapped twin (b,a) for every antonym pair whose twin is not
// already present. Synonym pairs are left alone: the synonym score is
// symmetric by construction. Idempotent.
std::vector<LabeledPair> augment_antonym_symmetry(const std::vector<LabeledPair>& pairs);

// k corrupted pairs per input pair: one side, chosen uniformly, is replaced
// by a uniform vocabulary word; draws that reproduce the original pair or
// make both words equal are redrawn. Requires |vocab| >= 3.
std::vector<std::pair<std::string, std::string>> corrupt_negatives(
    const std::vector<LabeledPair>& pairs, const std::vector<std::string>& vocab, int k,
    Rng& rng);

// N fresh irrelevant pairs (N = count if given, else |pairs|) of distinct
// vocabulary words, colliding (unordered) neither with the given pairs nor
// with each other. Gives up after 100*N draws.
std::vector<LabeledPair> synthesize_irrelevant(const std::vector<LabeledPair>& pairs,
                                               const std::vector<std::string>& vocab, Rng& rng,
                                               std::optional<std::size_t> count = std::nullopt);

}  // namespace lexdist
