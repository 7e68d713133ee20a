#include "lexdist/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "lexdist/errors.hpp"

namespace lexdist {

namespace {

using json = nlohmann::ordered_json;

json category_to_json(const CategoryReport& rep, int classes) {
  json j;
  j["total"] = rep.total;
  json conf = json::array();
  for (int r = 0; r < classes; ++r) {
    json row = json::array();
    for (int c = 0; c < classes; ++c) row.push_back(rep.confusion(r, c));
    conf.push_back(std::move(row));
  }
  j["confusion"] = std::move(conf);
  json pc = json::object();
  for (int c = 0; c < classes; ++c) {
    const auto& m = rep.per_class[static_cast<std::size_t>(c)];
    pc[to_string(relation_from_class(c))] = {{"precision", m.precision},
                                             {"recall", m.recall},
                                             {"f1", m.f1},
                                             {"support", m.support}};
  }
  j["per_class"] = std::move(pc);
  j["macro"] = {{"precision", rep.macro.precision},
                {"recall", rep.macro.recall},
                {"f1", rep.macro.f1}};
  return j;
}

void append_table(std::string& out, const std::string& name, const CategoryReport& rep,
                  int classes) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %-12s %9s %9s %9s %9s\n", name.c_str(), "class",
                "P", "R", "F1", "support");
  out += buf;
  for (int c = 0; c < classes; ++c) {
    const auto& m = rep.per_class[static_cast<std::size_t>(c)];
    std::snprintf(buf, sizeof buf, "%-12s %-12s %9.3f %9.3f %9.3f %9d\n", "",
                  to_string(relation_from_class(c)), m.precision, m.recall, m.f1, m.support);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-12s %-12s %9.3f %9.3f %9.3f %9d\n", "", "macro",
                rep.macro.precision, rep.macro.recall, rep.macro.f1, rep.total);
  out += buf;
}

}  // namespace

std::string EvalReport::to_json_string() const {
  json j;
  j["classes"] = classes;
  j["feature_mask"] = feature_mask;
  j["embedding_source"] = embedding_source;
  j["primary_class"] = to_string(relation_from_class(primary_class));
  j["overall"] = category_to_json(overall, classes);
  json cats = json::object();
  for (const auto& [cat, rep] : per_category) cats[to_string(cat)] = category_to_json(rep, classes);
  j["per_category"] = std::move(cats);
  return j.dump(2);
}

std::string EvalReport::to_text_table() const {
  std::string out;
  append_table(out, "overall", overall, classes);
  for (const auto& [cat, rep] : per_category) append_table(out, to_string(cat), rep, classes);
  return out;
}

EvalReport evaluate(const PairPredictor& predictor, const DistillerModel& model,
                    EmbeddingTable& table, const std::vector<LabeledPair>& test_pairs,
                    const FeatureMask& mask, Rng& rng,
                    const std::vector<LabeledPair>* train_pairs) {
  if (test_pairs.empty()) throw InputError("evaluate: empty test set");
  if (train_pairs) {
    std::set<std::pair<std::string, std::string>> train_set;
    for (const auto& p : *train_pairs) {
      auto key = p.word_a <= p.word_b ? std::make_pair(p.word_a, p.word_b)
                                      : std::make_pair(p.word_b, p.word_a);
      train_set.insert(key);
    }
    for (const auto& p : test_pairs) {
      auto key = p.word_a <= p.word_b ? std::make_pair(p.word_a, p.word_b)
                                      : std::make_pair(p.word_b, p.word_a);
      if (train_set.count(key))
        throw InputError("evaluate: test pair (" + p.word_a + ", " + p.word_b +
                         ") also appears in the training set");
    }
  }

  int classes = 2;
  for (const auto& p : test_pairs)
    classes = std::max(classes, class_index(p.relation) + 1);

  std::map<Category, std::pair<std::vector<int>, std::vector<int>>> by_cat;
  std::vector<int> y_true, y_pred;
  for (const auto& p : test_pairs) {
    PairFeatures f = build_features(model, table, p.word_a, p.word_b, mask, rng);
    Prediction pred = predictor(f);
    classes = std::max(classes, static_cast<int>(pred.probabilities.size()));
    const int truth = class_index(p.relation);
    y_true.push_back(truth);
    y_pred.push_back(pred.label);
    by_cat[p.category].first.push_back(truth);
    by_cat[p.category].second.push_back(pred.label);
  }

  EvalReport report;
  report.classes = classes;
  report.feature_mask = mask.to_string();
  report.overall = report_from_predictions(y_true, y_pred, classes);
  for (const auto& [cat, ys] : by_cat)
    report.per_category[cat] = report_from_predictions(ys.first, ys.second, classes);
  return report;
}

EvalReport evaluate(const BoostedForest& forest, const DistillerModel& model,
                    EmbeddingTable& table, const std::vector<LabeledPair>& test_pairs,
                    const FeatureMask& mask, Rng& rng,
                    const std::vector<LabeledPair>* train_pairs) {
  return evaluate([&](const PairFeatures& f) { return forest.predict(f); }, model, table,
                  test_pairs, mask, rng, train_pairs);
}

void write_report(const EvalReport& report, const std::string& json_path,
                  const std::string& text_path) {
  std::ofstream jf(json_path);
  if (!jf) throw InputError("cannot write report: " + json_path);
  jf << report.to_json_string() << '\n';
  std::ofstream tf(text_path);
  if (!tf) throw InputError("cannot write report: " + text_path);
  tf << report.to_text_table();
}

NeighborResult neighbors(const DistillerModel& model, EmbeddingTable& table,
                         const std::string& word, Subspace space, int top_k, Rng& rng) {
  if (top_k < 1) throw InputError("neighbors: top_k must be >= 1");
  table.lookup_or_init(word, rng);  // make the query resolvable before the scan
  const Eigen::Index n = table.size();
  const Eigen::Index qrow = table.find(word);

  Eigen::MatrixXd enc_s = encode_all(model.enc_syn, table.matrix());
  Eigen::VectorXd scores_all(n);
  if (space == Subspace::SYN) {
    const Eigen::VectorXd q = enc_s.row(qrow).transpose();
    for (Eigen::Index i = 0; i < n; ++i)
      scores_all[i] = cosine(q, enc_s.row(i).transpose());
  } else {
    Eigen::MatrixXd enc_a = encode_all(model.enc_ant, table.matrix());
    const Eigen::VectorXd qa = enc_a.row(qrow).transpose();
    const Eigen::VectorXd qs = enc_s.row(qrow).transpose();
    for (Eigen::Index i = 0; i < n; ++i)
      scores_all[i] = std::max(cosine(qa, enc_s.row(i).transpose()),
                               cosine(enc_a.row(i).transpose(), qs));
  }

  std::vector<Eigen::Index> order;
  order.reserve(static_cast<std::size_t>(n) - 1);
  for (Eigen::Index i = 0; i < n; ++i)
    if (i != qrow) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (scores_all[a] != scores_all[b]) return scores_all[a] > scores_all[b];
    return table.word_at(a) < table.word_at(b);
  });

  NeighborResult result;
  if (top_k > static_cast<int>(order.size())) {
    result.truncated = true;
    std::cerr << "warning: neighbors: top_k " << top_k << " exceeds candidate count "
              << order.size() << ", truncating\n";
  }
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(top_k), order.size());
  for (std::size_t i = 0; i < take; ++i)
    result.neighbors.push_back({table.word_at(order[i]), scores_all[order[i]]});
  return result;
}

}  // namespace lexdist
