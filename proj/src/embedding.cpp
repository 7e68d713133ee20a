#include "lexdist/embedding.hpp"
#include <algorithm>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "lexdist/errors.hpp"

namespace lexdist {

namespace {

using json = nlohmann::ordered_json;

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view tok, double& out) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_nonneg_int(std::string_view tok, long& out) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc{} && ptr == end && out >= 0;
}

void strip_eol(std::string& line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
}

}  // namespace

Eigen::Index EmbeddingTable::find(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? -1 : it->second;
}

void EmbeddingTable::reserve_row() {
  if (rows_ == vectors_.rows()) {
    Eigen::Index cap = std::max<Eigen::Index>(16, 2 * vectors_.rows());
    vectors_.conservativeResize(cap, dim_);
  }
}

Eigen::Index EmbeddingTable::insert(const std::string& word, const Eigen::RowVectorXd& vec) {
  if (index_.count(word)) throw InputError("duplicate word insert: " + word);
  if (dim_ == 0) dim_ = vec.size();
  if (vec.size() != dim_)
    throw InputError("vector for '" + word + "' has dimension " + std::to_string(vec.size()) +
                     ", table has " + std::to_string(dim_));
  reserve_row();
  vectors_.row(rows_) = vec;
  words_.push_back(word);
  index_.emplace(word, rows_);
  return rows_++;
}

Eigen::RowVectorXd EmbeddingTable::lookup_or_init(const std::string& word, Rng& rng) {
  if (auto it = index_.find(word); it != index_.end()) return vectors_.row(it->second);
  if (dim_ <= 0) throw InputError("lookup_or_init on a table without a dimension");
  const double half = 0.5 / static_cast<double>(dim_);
  std::uniform_real_distribution<double> dist(-half, half);
  Eigen::RowVectorXd vec(dim_);
  for (Eigen::Index i = 0; i < dim_; ++i) vec[i] = dist(rng);
  Eigen::Index row = insert(word, vec);
  oov_seeded_.insert(word);
  return vectors_.row(row);
}

EmbeddingTable load_embeddings(const std::string& path, std::optional<Eigen::Index> expected_dim) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file: " + path);

  EmbeddingTable table;
  std::string line;
  long line_no = 0;
  bool first_content_line = true;

  auto fail = [&](const std::string& msg) {
    throw InputError(path + ":" + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    strip_eol(line);
    auto toks = split_ws(line);
    if (toks.empty()) continue;

    if (first_content_line && toks.size() == 2) {
      long a, b;
      if (parse_nonneg_int(toks[0], a) && parse_nonneg_int(toks[1], b)) {
        first_content_line = false;
        continue;  // word2vec-style "N d" header
      }
    }
    first_content_line = false;

    if (toks.size() < 2) fail("expected `word v1 ... vd`");
    const Eigen::Index d = static_cast<Eigen::Index>(toks.size()) - 1;
    if (table.dim() == 0) {
      if (expected_dim && d != *expected_dim)
        fail("dimension " + std::to_string(d) + " does not match expected " +
             std::to_string(*expected_dim));
      table.dim_ = d;
    } else if (d != table.dim()) {
      fail("dimension " + std::to_string(d) + " does not match " + std::to_string(table.dim()));
    }

    std::string word(toks[0]);
    if (table.contains(word)) {
      ++table.duplicates_skipped;
      continue;  // first occurrence wins
    }

    Eigen::RowVectorXd vec(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      double v;
      if (!parse_double(toks[static_cast<std::size_t>(i) + 1], v))
        fail("cannot parse value '" + std::string(toks[static_cast<std::size_t>(i) + 1]) + "'");
      if (!std::isfinite(v)) fail("non-finite value in vector for '" + word + "'");
      vec[i] = v;
    }
    table.insert(word, vec);
  }

  if (table.size() == 0) throw InputError(path + ": no embedding records found");
  if (table.duplicates_skipped > 0)
    std::cerr << "warning: " << path << ": skipped " << table.duplicates_skipped
              << " duplicate word(s), first occurrence kept\n";
  return table;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write embedding file: " + path);
  char buf[64];
  for (Eigen::Index r = 0; r < table.size(); ++r) {
    out << table.word_at(r);
    for (Eigen::Index c = 0; c < table.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", table.row(r)[c]);
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out) throw InputError("write failed: " + path);

  json meta;
  meta["dim"] = table.dim();
  if (table.seed())
    meta["seed"] = *table.seed();
  else
    meta["seed"] = nullptr;
  std::vector<std::string> oov(table.oov_seeded().begin(), table.oov_seeded().end());
  std::sort(oov.begin(), oov.end());
  meta["oov_seeded"] = oov;
  std::ofstream mout(path + ".meta.json");
  if (!mout) throw InputError("cannot write metadata file: " + path + ".meta.json");
  mout << meta.dump(2) << '\n';
}

EmbeddingTable make_random_table(const std::vector<std::string>& words, Eigen::Index d,
                                 std::uint64_t seed) {
  if (words.empty()) throw InputError("make_random_table: empty word list");
  if (d <= 0) throw InputError("make_random_table: dimension must be positive");
  EmbeddingTable table(d);
  Rng rng = make_rng(seed, "random-table");
  const double half = 0.5 / static_cast<double>(d);
  std::uniform_real_distribution<double> dist(-half, half);
  Eigen::RowVectorXd vec(d);
  for (const auto& w : words) {
    for (Eigen::Index i = 0; i < d; ++i) vec[i] = dist(rng);
    table.insert(w, vec);
  }
  table.set_seed(seed);
  return table;
}

double cosine(const Eigen::Ref<const Eigen::VectorXd>& u,
              const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size())
    throw InputError("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()) + ")");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu < 1e-12 || nv < 1e-12) return 0.0;
  // rounding can land an ulp outside [-1,1]
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

}  // namespace lexdist
