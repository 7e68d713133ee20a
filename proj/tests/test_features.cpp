#include <doctest.h>

#include "lexdist/errors.hpp"
#include "lexdist/features.hpp"
#include "support/fixtures.hpp"

using namespace lexdist;

TEST_CASE("prefix_feature full truth table over all 14 prefixes") {
  for (const char* p : kNegationPrefixes) {
    const std::string base = "word";
    const std::string negated = std::string(p) + base;
    CHECK(prefix_feature(base, negated) == 1);
    CHECK(prefix_feature(negated, base) == 1);
    // a changed remainder must not fire
    CHECK(prefix_feature("other", negated) == 0);
  }
}

TEST_CASE("prefix_feature canonical examples and edge cases") {
  CHECK(prefix_feature("able", "unable") == 1);
  CHECK(prefix_feature("relevant", "irrelevant") == 1);
  CHECK(prefix_feature("big", "small") == 0);
  CHECK(prefix_feature("normal", "anormal") == 1);
  // literal concatenation: fires even when the remainder is itself a prefix
  CHECK(prefix_feature("a", "aa") == 1);
  // same word never differs by a prefix
  CHECK(prefix_feature("case", "case") == 0);
  // prefix matches are exact: no case folding
  CHECK(prefix_feature("able", "UNable") == 0);
  CHECK_THROWS_AS(prefix_feature("", "x"), InputError);
}

TEST_CASE("feature mask round-trips through strings") {
  FeatureMask all;
  CHECK(all.to_string() == "distiller+distributional+prefix");
  CHECK(FeatureMask::from_string("distiller+prefix") == FeatureMask{true, false, true});
  CHECK(FeatureMask::from_string("none") == FeatureMask{false, false, false});
  CHECK_THROWS_AS(FeatureMask::from_string("bogus"), InputError);
}

TEST_CASE("build_features computes the documented components") {
  DistillerModel model = init_distiller({4, 5, 3, 2, 77});
  EmbeddingTable table = make_random_table({"able", "unable", "cold"}, 4, 7);
  Rng rng = make_rng(7, "feat");

  FeatureMask all;
  PairFeatures f = build_features(model, table, "able", "unable", all, rng);
  CHECK(f.prefix == 1);

  // component-wise recomputation through the public primitives
  Eigen::VectorXd va = table.row(table.find("able")).transpose();
  Eigen::VectorXd vb = table.row(table.find("unable")).transpose();
  PairScores s = scores(model, va, vb);
  CHECK(f.synonymy == s.synonymy);
  CHECK(f.antonymy == s.antonymy);
  CHECK(f.distributional == cosine(va, vb));
}

TEST_CASE("build_features on the same word twice") {
  DistillerModel model = init_distiller({4, 5, 3, 2, 78});
  EmbeddingTable table = make_random_table({"same", "other"}, 4, 8);
  Rng rng = make_rng(8, "feat");
  PairFeatures f = build_features(model, table, "same", "same", {}, rng);
  CHECK(f.synonymy == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.distributional == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.prefix == 0);
}

TEST_CASE("masking zeroes disabled features and rejects empty masks") {
  DistillerModel model = init_distiller({4, 5, 3, 2, 79});
  EmbeddingTable table = make_random_table({"able", "unable"}, 4, 9);
  Rng rng = make_rng(9, "feat");

  FeatureMask distiller_only{true, false, false};
  PairFeatures f = build_features(model, table, "able", "unable", distiller_only, rng);
  CHECK(f.synonymy != 0.0);
  CHECK(f.distributional == 0.0);
  CHECK(f.prefix == 0);
  CHECK(f.mask == distiller_only);

  CHECK_THROWS_AS(
      build_features(model, table, "able", "unable", FeatureMask{false, false, false}, rng),
      InputError);
}

TEST_CASE("all four features are swap-invariant") {
  DistillerModel model = init_distiller({5, 6, 4, 2, 80});
  std::vector<std::string> words = {"alpha", "beta", "gamma", "unalpha", "delta"};
  EmbeddingTable table = make_random_table(words, 5, 10);
  Rng rng = make_rng(10, "feat");
  for (const auto& a : words)
    for (const auto& b : words) {
      if (a == b) continue;
      PairFeatures ab = build_features(model, table, a, b, {}, rng);
      PairFeatures ba = build_features(model, table, b, a, {}, rng);
      CHECK(ab.synonymy == ba.synonymy);
      CHECK(ab.antonymy == ba.antonymy);
      CHECK(ab.distributional == ba.distributional);
      CHECK(ab.prefix == ba.prefix);
    }
}

TEST_CASE("OOV words are seeded and reused") {
  DistillerModel model = init_distiller({4, 5, 3, 2, 81});
  EmbeddingTable table = make_random_table({"known"}, 4, 11);
  Rng rng = make_rng(11, "feat");
  PairFeatures once = build_features(model, table, "known", "novel", {}, rng);
  PairFeatures again = build_features(model, table, "known", "novel", {}, rng);
  CHECK(table.oov_seeded().count("novel") == 1);
  CHECK(once.synonymy == again.synonymy);
  CHECK(once.distributional == again.distributional);
}

TEST_CASE("dump_features writes one row per pair") {
  DistillerModel model = init_distiller({4, 5, 3, 2, 82});
  EmbeddingTable table = make_random_table({"hot", "cold"}, 4, 12);
  Rng rng = make_rng(12, "feat");
  std::vector<LabeledPair> pairs = {{"hot", "cold", Relation::antonym, Category::adjective}};
  std::vector<PairFeatures> feats = {build_features(model, table, "hot", "cold", {}, rng)};
  lexdist::testing::TempDir dir("fdump");
  auto path = (dir / "features.tsv").string();
  dump_features(pairs, feats, path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "word_a\tword_b\tsynonymy\tantonymy\tdistributional\tprefix\tlabel");
  CHECK(row.find("hot\tcold\t") == 0);
  CHECK(row.find("antonym") != std::string::npos);
}
