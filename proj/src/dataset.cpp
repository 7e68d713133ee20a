#include "lexdist/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lexdist/errors.hpp"

namespace lexdist {

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Unordered identity of a word pair.
std::pair<std::string, std::string> canonical(const std::string& a, const std::string& b) {
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return out;
}

void strip_eol(std::string& line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
}

struct PairRecord {
  LabeledPair pair;
  std::string split;  // empty for 3-column files
};

std::vector<PairRecord> load_records(const std::string& path, Category default_category) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open pair file: " + path);

  std::vector<PairRecord> records;
  std::string line;
  long line_no = 0;
  int expected_cols = 0;

  auto fail = [&](const std::string& msg) {
    throw InputError(path + ":" + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    strip_eol(line);
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 3 && cols.size() != 5)
      fail("expected 3 or 5 tab-separated fields, got " + std::to_string(cols.size()));
    if (expected_cols == 0) expected_cols = static_cast<int>(cols.size());
    if (static_cast<int>(cols.size()) != expected_cols)
      fail("inconsistent column count (" + std::to_string(cols.size()) + " vs " +
           std::to_string(expected_cols) + ")");

    PairRecord rec;
    rec.pair.word_a = cols[0];
    rec.pair.word_b = cols[1];
    if (rec.pair.word_a.empty() || rec.pair.word_b.empty()) fail("empty word field");
    if (rec.pair.word_a == rec.pair.word_b) fail("word_a equals word_b: '" + cols[0] + "'");
    try {
      rec.pair.relation = relation_from_string(cols[2]);
    } catch (const InputError& e) {
      fail(e.what());
    }
    if (cols.size() == 5) {
      try {
        rec.pair.category = category_from_string(cols[3]);
      } catch (const InputError& e) {
        fail(e.what());
      }
      rec.split = lower(cols[4]);
      if (rec.split != "train" && rec.split != "dev" && rec.split != "test")
        fail("unknown split '" + cols[4] + "'");
    } else {
      rec.pair.category = default_category;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

const char* to_string(Relation r) {
  switch (r) {
    case Relation::synonym: return "synonym";
    case Relation::antonym: return "antonym";
    case Relation::irrelevant: return "irrelevant";
  }
  return "?";
}

const char* to_string(Category c) {
  switch (c) {
    case Category::noun: return "noun";
    case Category::verb: return "verb";
    case Category::adjective: return "adjective";
    case Category::unspecified: return "unspecified";
  }
  return "?";
}

Relation relation_from_string(const std::string& s) {
  std::string t = lower(s);
  if (t == "synonym" || t == "0") return Relation::synonym;
  if (t == "antonym" || t == "1") return Relation::antonym;
  if (t == "irrelevant") return Relation::irrelevant;
  throw InputError("unknown relation label '" + s + "'");
}

Category category_from_string(const std::string& s) {
  std::string t = lower(s);
  if (t == "noun") return Category::noun;
  if (t == "verb") return Category::verb;
  if (t == "adjective") return Category::adjective;
  if (t == "unspecified" || t == "all" || t.empty()) return Category::unspecified;
  throw InputError("unknown category '" + s + "'");
}

void DatasetSplit::finalize() {
  // Disjointness is across splits; the same pair may recur within one split
  // under different categories.
  std::set<std::pair<std::string, std::string>> train_set, dev_set;
  for (const auto& p : train) train_set.insert(canonical(p.word_a, p.word_b));
  for (const auto& p : dev) {
    auto key = canonical(p.word_a, p.word_b);
    if (train_set.count(key))
      throw InputError("pair (" + p.word_a + ", " + p.word_b + ") appears in train and dev");
    dev_set.insert(key);
  }
  for (const auto& p : test) {
    auto key = canonical(p.word_a, p.word_b);
    if (train_set.count(key))
      throw InputError("pair (" + p.word_a + ", " + p.word_b + ") appears in train and test");
    if (dev_set.count(key))
      throw InputError("pair (" + p.word_a + ", " + p.word_b + ") appears in dev and test");
  }

  std::set<std::string> words;
  for (const auto& p : train) {
    words.insert(p.word_a);
    words.insert(p.word_b);
  }
  vocab.assign(words.begin(), words.end());
}

std::vector<LabeledPair> load_pairs(const std::string& path, Category category) {
  std::vector<LabeledPair> out;
  for (auto& rec : load_records(path, category)) out.push_back(std::move(rec.pair));
  return out;
}

DatasetSplit load_split_file(const std::string& path) {
  DatasetSplit split;
  auto records = load_records(path, Category::unspecified);
  for (auto& rec : records) {
    if (rec.split.empty())
      throw InputError(path + ": 3-column file carries no split information; use "
                              "load_pairs or the <category>.<split>.tsv layout");
    auto& bucket = rec.split == "train" ? split.train : rec.split == "dev" ? split.dev : split.test;
    bucket.push_back(std::move(rec.pair));
  }
  split.finalize();
  return split;
}

DatasetSplit load_split_dir(const std::string& dir, Category category) {
  namespace fs = std::filesystem;
  DatasetSplit split;
  std::vector<Category> cats;
  if (category == Category::unspecified)
    cats = {Category::noun, Category::verb, Category::adjective};
  else
    cats = {category};

  bool found_any = false;
  for (Category cat : cats) {
    for (const char* split_name : {"train", "dev", "test"}) {
      fs::path p = fs::path(dir) / (std::string(to_string(cat)) + "." + split_name + ".tsv");
      if (!fs::exists(p)) continue;
      found_any = true;
      auto pairs = load_pairs(p.string(), cat);
      auto& bucket = std::string(split_name) == "train" ? split.train
                     : std::string(split_name) == "dev" ? split.dev
                                                        : split.test;
      bucket.insert(bucket.end(), pairs.begin(), pairs.end());
    }
  }
  if (!found_any)
    throw InputError("no <category>.<split>.tsv files found under " + dir + " for category '" +
                     to_string(category) + "'");
  split.finalize();
  return split;
}

std::vector<LabeledPair> augment_antonym_symmetry(const std::vector<LabeledPair>& pairs) {
  std::set<std::pair<std::string, std::string>> antonyms;  // ordered identity
  for (const auto& p : pairs)
    if (p.relation == Relation::antonym) antonyms.emplace(p.word_a, p.word_b);

  std::vector<LabeledPair> out = pairs;
  for (const auto& p : pairs) {
    if (p.relation != Relation::antonym) continue;
    auto swapped = std::make_pair(p.word_b, p.word_a);
    if (antonyms.insert(swapped).second)
      out.push_back({p.word_b, p.word_a, Relation::antonym, p.category});
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> corrupt_negatives(
    const std::vector<LabeledPair>& pairs, const std::vector<std::string>& vocab, int k,
    Rng& rng) {
  if (k < 1) throw InputError("corrupt_negatives: k must be >= 1");
  if (vocab.size() < 3)
    throw InputError("corrupt_negatives: vocabulary of " + std::to_string(vocab.size()) +
                     " cannot avoid collisions");
  std::uniform_int_distribution<std::size_t> pick_word(0, vocab.size() - 1);
  std::uniform_int_distribution<int> pick_side(0, 1);

  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(pairs.size() * static_cast<std::size_t>(k));
  for (const auto& p : pairs) {
    for (int i = 0; i < k; ++i) {
      while (true) {
        const bool replace_a = pick_side(rng) == 0;
        const std::string& w = vocab[pick_word(rng)];
        const std::string& kept = replace_a ? p.word_b : p.word_a;
        const std::string& orig = replace_a ? p.word_a : p.word_b;
        if (w == kept || w == orig) continue;  // equal words or the original pair
        if (replace_a)
          out.emplace_back(w, p.word_b);
        else
          out.emplace_back(p.word_a, w);
        break;
      }
    }
  }
  return out;
}

std::vector<LabeledPair> synthesize_irrelevant(const std::vector<LabeledPair>& pairs,
                                               const std::vector<std::string>& vocab, Rng& rng,
                                               std::optional<std::size_t> count) {
  if (pairs.empty()) throw InputError("synthesize_irrelevant: no labeled pairs given");
  if (vocab.size() < 2) throw InputError("synthesize_irrelevant: vocabulary too small");

  std::set<std::pair<std::string, std::string>> taken;
  for (const auto& p : pairs) taken.insert(canonical(p.word_a, p.word_b));

  Category category = pairs.front().category;
  for (const auto& p : pairs)
    if (p.category != category) category = Category::unspecified;

  const std::size_t n = count.value_or(pairs.size());
  const std::size_t budget = 100 * n;
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);

  std::vector<LabeledPair> out;
  out.reserve(n);
  std::size_t draws = 0;
  while (out.size() < n) {
    if (draws++ >= budget)
      throw InputError("synthesize_irrelevant: retry budget exhausted (vocabulary too small "
                       "to generate " + std::to_string(n) + " non-colliding pairs)");
    const std::string& a = vocab[pick(rng)];
    const std::string& b = vocab[pick(rng)];
    if (a == b) continue;
    if (!taken.insert(canonical(a, b)).second) continue;
    out.push_back({a, b, Relation::irrelevant, category});
  }
  return out;
}

}  // namespace lexdist
