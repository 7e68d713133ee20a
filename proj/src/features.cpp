#include "lexdist/features.hpp"

#include <cstdio>
#include <fstream>

#include "lexdist/errors.hpp"

namespace lexdist {

int prefix_feature(const std::string& a, const std::string& b) {
  if (a.empty() || b.empty()) throw InputError("prefix_feature: empty word");
  for (const char* prefix : kNegationPrefixes) {
    const std::string p(prefix);
    if (a.size() == p.size() + b.size() && a.compare(0, p.size(), p) == 0 &&
        a.compare(p.size(), b.size(), b) == 0)
      return 1;
    if (b.size() == p.size() + a.size() && b.compare(0, p.size(), p) == 0 &&
        b.compare(p.size(), a.size(), a) == 0)
      return 1;
  }
  return 0;
}

std::string FeatureMask::to_string() const {
  std::string s;
  auto add = [&](const char* name) {
    if (!s.empty()) s += '+';
    s += name;
  };
  if (distiller) add("distiller");
  if (distributional) add("distributional");
  if (prefix) add("prefix");
  return s.empty() ? "none" : s;
}

FeatureMask FeatureMask::from_string(const std::string& s) {
  FeatureMask m{false, false, false};
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t plus = s.find('+', start);
    std::string tok = s.substr(start, plus == std::string::npos ? plus : plus - start);
    if (tok == "distiller")
      m.distiller = true;
    else if (tok == "distributional")
      m.distributional = true;
    else if (tok == "prefix")
      m.prefix = true;
    else if (!tok.empty() && tok != "none")
      throw InputError("unknown feature '" + tok + "'");
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  return m;
}

PairFeatures build_features(const DistillerModel& model, EmbeddingTable& table,
                            const std::string& a, const std::string& b,
                            const FeatureMask& mask, Rng& rng) {
  if (!mask.any()) throw InputError("build_features: feature mask enables nothing");
  PairFeatures f;
  f.mask = mask;
  Eigen::VectorXd va = table.lookup_or_init(a, rng).transpose();
  Eigen::VectorXd vb = table.lookup_or_init(b, rng).transpose();
  if (mask.distiller) {
    PairScores s = scores(model, va, vb);
    f.synonymy = s.synonymy;
    f.antonymy = s.antonymy;
  }
  if (mask.distributional) f.distributional = cosine(va, vb);
  if (mask.prefix) f.prefix = prefix_feature(a, b);
  return f;
}

void dump_features(const std::vector<LabeledPair>& pairs,
                   const std::vector<PairFeatures>& features, const std::string& path) {
  if (pairs.size() != features.size()) throw InputError("dump_features: length mismatch");
  std::ofstream out(path);
  if (!out) throw InputError("cannot write feature dump: " + path);
  out << "word_a\tword_b\tsynonymy\tantonymy\tdistributional\tprefix\tlabel\n";
  char buf[128];
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& f = features[i];
    std::snprintf(buf, sizeof buf, "\t%.17g\t%.17g\t%.17g\t%d\t", f.synonymy, f.antonymy,
                  f.distributional, f.prefix);
    out << pairs[i].word_a << '\t' << pairs[i].word_b << buf << to_string(pairs[i].relation)
        << '\n';
  }
}

}  // namespace lexdist
