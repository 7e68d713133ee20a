#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexdist/baseline.hpp"
#include "lexdist/classifier.hpp"
#include "lexdist/dataset.hpp"
#include "lexdist/distiller.hpp"
#include "lexdist/embedding.hpp"
#include "lexdist/errors.hpp"
#include "lexdist/evaluation.hpp"
#include "lexdist/features.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace lexdist;

namespace {

struct CommonOpts {
  std::string embeddings;
  long random_dim = 0;  // >0: random-vector control instead of a file
  std::string pairs_dir;
  std::string pairs_file;
  std::string category = "all";
  std::vector<std::string> features;
  int classes = 2;
  std::uint64_t seed = 42;
  std::string out = "out";
};

struct TrainOpts {
  long subspace_dim = 60;
  long hidden_units = 80;
  double learning_rate = 1e-3;
  int epochs = 200;
  int batch = 64;
  int k_neg = 5;
  int patience = 20;
  double margin = 1.0;
  std::string classifier_kind = "boosted";
  int trees = 200;
  int depth = 4;
  double tree_lr = 0.1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_pairs) {
  cmd->fallthrough(true);  // lets --config reach the top-level app
  cmd->add_option("--embeddings", o.embeddings, "pre-trained embedding text file");
  cmd->add_option("--random-dim", o.random_dim,
                  "use seeded random vectors of this dimension instead of --embeddings");
  if (needs_pairs) {
    cmd->add_option("--pairs-dir", o.pairs_dir,
                    "directory of <category>.<split>.tsv pair files");
    cmd->add_option("--pairs", o.pairs_file, "single 5-column pair file with split labels");
    cmd->add_option("--category", o.category, "noun|verb|adjective|all")
        ->check(CLI::IsMember({"noun", "verb", "adjective", "all"}));
  }
  cmd->add_option("--features", o.features,
                  "feature set: distiller, distributional, prefix (repeatable; default all)")
      ->check(CLI::IsMember({"distiller", "distributional", "prefix"}));
  cmd->add_option("--classes", o.classes, "2 = synonym/antonym, 3 = +irrelevant")
      ->check(CLI::IsMember(std::set<int>{2, 3}));
  cmd->add_option("--seed", o.seed, "seed for every stochastic component");
  cmd->add_option("--out", o.out, "output directory");
}

void add_train(CLI::App* cmd, TrainOpts& o) {
  cmd->add_option("--dim", o.subspace_dim, "distilled sub-space dimension");
  cmd->add_option("--hidden", o.hidden_units, "first encoder layer width");
  cmd->add_option("--lr", o.learning_rate, "Adam learning rate");
  cmd->add_option("--epochs", o.epochs, "training epoch cap");
  cmd->add_option("--batch", o.batch, "positive pairs per relation per batch");
  cmd->add_option("--k-neg", o.k_neg, "corrupted negatives per positive pair");
  cmd->add_option("--patience", o.patience, "early-stopping patience on dev F1 (0 = off)");
  cmd->add_option("--margin", o.margin, "hinge margin of the ranking losses");
  cmd->add_option("--classifier-kind", o.classifier_kind, "boosted | logistic")
      ->check(CLI::IsMember({"boosted", "logistic"}));
  cmd->add_option("--trees", o.trees, "boosting rounds");
  cmd->add_option("--depth", o.depth, "tree depth cap");
  cmd->add_option("--tree-lr", o.tree_lr, "boosting shrinkage");
}

FeatureMask mask_from(const std::vector<std::string>& features) {
  if (features.empty()) return {};  // all three
  FeatureMask m{false, false, false};
  for (const auto& f : features) {
    if (f == "distiller") m.distiller = true;
    if (f == "distributional") m.distributional = true;
    if (f == "prefix") m.prefix = true;
  }
  return m;
}

json config_json(const CommonOpts& c, const TrainOpts* t) {
  json j;
  j["embeddings"] = c.random_dim > 0 ? "random:" + std::to_string(c.random_dim) : c.embeddings;
  j["pairs_dir"] = c.pairs_dir;
  j["pairs_file"] = c.pairs_file;
  j["category"] = c.category;
  j["features"] = mask_from(c.features).to_string();
  j["classes"] = c.classes;
  j["seed"] = c.seed;
  if (t) {
    j["subspace_dim"] = t->subspace_dim;
    j["hidden_units"] = t->hidden_units;
    j["learning_rate"] = t->learning_rate;
    j["epochs"] = t->epochs;
    j["batch"] = t->batch;
    j["k_negatives"] = t->k_neg;
    j["patience"] = t->patience;
    j["margin"] = t->margin;
    j["classifier_kind"] = t->classifier_kind;
    j["trees"] = t->trees;
    j["depth"] = t->depth;
    j["tree_lr"] = t->tree_lr;
  }
  return j;
}

DatasetSplit load_data(const CommonOpts& o) {
  if (!o.pairs_file.empty()) return load_split_file(o.pairs_file);
  if (!o.pairs_dir.empty()) return load_split_dir(o.pairs_dir, category_from_string(o.category));
  throw InputError("no pair data given: use --pairs-dir or --pairs");
}

// Equal-proportion irrelevant pairs per split, excluding every labeled pair
// seen in any split plus the synthetics made so far.
void add_irrelevant(DatasetSplit& split, std::uint64_t seed) {
  std::vector<LabeledPair> exclusion;
  for (const auto* part : {&split.train, &split.dev, &split.test})
    exclusion.insert(exclusion.end(), part->begin(), part->end());

  struct Part {
    std::vector<LabeledPair>* pairs;
    const char* tag;
  };
  for (const Part& part : {Part{&split.train, "irrelevant-train"},
                           Part{&split.dev, "irrelevant-dev"},
                           Part{&split.test, "irrelevant-test"}}) {
    if (part.pairs->empty()) continue;
    Rng rng = make_rng(seed, part.tag);
    auto extra = synthesize_irrelevant(exclusion, split.vocab, rng, part.pairs->size());
    exclusion.insert(exclusion.end(), extra.begin(), extra.end());
    part.pairs->insert(part.pairs->end(), extra.begin(), extra.end());
  }
}

EmbeddingTable open_embeddings(const CommonOpts& o, const DatasetSplit* split) {
  if (o.random_dim > 0) {
    if (!split) throw InputError("--random-dim needs pair data to define the vocabulary");
    std::set<std::string> words(split->vocab.begin(), split->vocab.end());
    for (const auto* part : {&split->train, &split->dev, &split->test})
      for (const auto& p : *part) {
        words.insert(p.word_a);
        words.insert(p.word_b);
      }
    return make_random_table({words.begin(), words.end()}, o.random_dim, o.seed);
  }
  if (o.embeddings.empty())
    throw InputError("no embeddings given: use --embeddings or --random-dim");
  return load_embeddings(o.embeddings);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

std::vector<std::pair<PairFeatures, int>> featurize(const DistillerModel& model,
                                                    EmbeddingTable& table,
                                                    const std::vector<LabeledPair>& pairs,
                                                    const FeatureMask& mask, Rng& rng) {
  std::vector<std::pair<PairFeatures, int>> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs)
    out.emplace_back(build_features(model, table, p.word_a, p.word_b, mask, rng),
                     class_index(p.relation));
  return out;
}

void print_report(const EvalReport& rep) {
  std::cout << rep.to_text_table();
  const auto& ant = rep.overall.per_class[static_cast<std::size_t>(rep.primary_class)];
  std::printf("P_antonym=%.6f\nR_antonym=%.6f\nF1_antonym=%.6f\n", ant.precision, ant.recall,
              ant.f1);
  std::printf("P_macro=%.6f\nR_macro=%.6f\nF1_macro=%.6f\n", rep.overall.macro.precision,
              rep.overall.macro.recall, rep.overall.macro.f1);
}

int cmd_train(const CommonOpts& common, const TrainOpts& topt) {
  const auto t0 = std::chrono::steady_clock::now();
  DatasetSplit split = load_data(common);
  if (common.classes == 3) add_irrelevant(split, common.seed);
  EmbeddingTable table = open_embeddings(common, &split);
  std::cerr << "loaded " << table.size() << " x " << table.dim() << " embeddings, "
            << split.train.size() << "/" << split.dev.size() << "/" << split.test.size()
            << " train/dev/test pairs\n";

  fs::create_directories(common.out);
  const json cfg_json = config_json(common, &topt);
  write_file(fs::path(common.out) / "config.json", cfg_json.dump(2) + "\n");

  DistillerConfig arch;
  arch.hidden_units = topt.hidden_units;
  arch.subspace_dim = topt.subspace_dim;
  arch.classes = 2;  // Phase I is binary; irrelevant pairs enter in Phase II
  TrainConfig cfg;
  cfg.learning_rate = topt.learning_rate;
  cfg.batch_size = topt.batch;
  cfg.epochs = topt.epochs;
  cfg.k_negatives = topt.k_neg;
  cfg.margin = topt.margin;
  cfg.patience = topt.patience;
  cfg.seed = common.seed;

  TrainResult result = train_distiller(table, split, arch, cfg);
  const fs::path out(common.out);
  write_trace(result.trace, (out / "trace.tsv").string());
  save_model(result.model, (out / "model.json").string(), cfg_json.dump());
  std::cerr << "distiller trained: " << result.trace.size() << " epochs";
  if (result.best_epoch >= 0) std::cerr << ", best dev epoch " << result.best_epoch;
  std::cerr << "\n";

  const FeatureMask mask = mask_from(common.features);
  Rng frng = make_rng(common.seed, "phase2-features");
  auto train_feats = featurize(result.model, table, split.train, mask, frng);
  std::vector<PairFeatures> feats_only;
  feats_only.reserve(train_feats.size());
  for (const auto& [f, y] : train_feats) feats_only.push_back(f);
  dump_features(split.train, feats_only, (out / "train_features.tsv").string());

  AnyClassifier clf;
  if (topt.classifier_kind == "logistic") {
    LogisticParams lp;
    lp.classes = common.classes;
    clf = fit_logistic(train_feats, lp);
  } else {
    BoostParams bp;
    bp.n_trees = topt.trees;
    bp.max_depth = topt.depth;
    bp.learning_rate = topt.tree_lr;
    bp.classes = common.classes;
    bp.seed = common.seed;
    clf = fit_boosted(train_feats, bp);
  }
  save_any(clf, (out / "classifier.json").string(), cfg_json.dump());

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "phase II trained; artifacts in " << common.out << "\n";
  std::printf("train_seconds=%.1f\n", secs);
  return 0;
}

int cmd_evaluate(const CommonOpts& common, const std::string& model_path,
                 const std::string& classifier_path) {
  DatasetSplit split = load_data(common);
  if (common.classes == 3) add_irrelevant(split, common.seed);
  EmbeddingTable table = open_embeddings(common, &split);
  DistillerModel model = load_model(model_path);
  AnyClassifier clf = load_any(classifier_path);

  const FeatureMask mask = mask_from(common.features);
  Rng rng = make_rng(common.seed, "evaluate");
  EvalReport rep =
      evaluate([&](const PairFeatures& f) { return predict_any(clf, f); }, model, table,
               split.test, mask, rng, &split.train);
  rep.embedding_source =
      common.random_dim > 0 ? "random:" + std::to_string(common.random_dim) : common.embeddings;

  fs::create_directories(common.out);
  const fs::path out(common.out);
  write_file(out / "config.json", config_json(common, nullptr).dump(2) + "\n");
  write_report(rep, (out / "report.json").string(), (out / "report.txt").string());
  print_report(rep);
  return 0;
}

int cmd_score(const CommonOpts& common, const std::string& model_path,
              const std::string& classifier_path, const std::string& word_a,
              const std::string& word_b) {
  EmbeddingTable table = open_embeddings(common, nullptr);
  DistillerModel model = load_model(model_path);
  AnyClassifier clf = load_any(classifier_path);
  const FeatureMask mask = mask_from(common.features);
  Rng rng = make_rng(common.seed, "score");
  PairFeatures f = build_features(model, table, word_a, word_b, mask, rng);
  Prediction pred = predict_any(clf, f);
  std::printf("%s\t%s\tlabel=%s\tsynonymy=%.6f\tantonymy=%.6f\tdistributional=%.6f\tprefix=%d",
              word_a.c_str(), word_b.c_str(), to_string(relation_from_class(pred.label)),
              f.synonymy, f.antonymy, f.distributional, f.prefix);
  for (Eigen::Index c = 0; c < pred.probabilities.size(); ++c)
    std::printf("\tp_%s=%.6f", to_string(relation_from_class(static_cast<int>(c))),
                pred.probabilities[c]);
  std::printf("\n");
  return 0;
}

int cmd_neighbors(const CommonOpts& common, const std::string& model_path,
                  const std::string& word, const std::string& space, int top_k) {
  EmbeddingTable table = open_embeddings(common, nullptr);
  DistillerModel model = load_model(model_path);
  Rng rng = make_rng(common.seed, "neighbors");
  NeighborResult res = neighbors(model, table, word,
                                 space == "ant" ? Subspace::ANT : Subspace::SYN, top_k, rng);
  for (const auto& n : res.neighbors) std::printf("%s\t%.6f\n", n.word.c_str(), n.score);
  return 0;
}

int cmd_baseline(const CommonOpts& common, int k_pivots, int trees, int depth, double tree_lr) {
  DatasetSplit split = load_data(common);
  if (common.classes == 3) add_irrelevant(split, common.seed);
  EmbeddingTable table = open_embeddings(common, &split);
  if (split.test.empty()) throw InputError("baseline: no test pairs");

  PivotSet pivots = fit_pivots(split.train, table, k_pivots, common.seed);
  Rng frng = make_rng(common.seed, "baseline-features");
  const Eigen::Index dim = 1 + pivots.k() + table.dim();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(split.train.size()), dim);
  std::vector<int> y;
  for (std::size_t i = 0; i < split.train.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) =
        baseline_features(split.train[i], table, pivots, frng).transpose();
    y.push_back(class_index(split.train[i].relation));
  }
  BoostParams bp;
  bp.n_trees = trees;
  bp.max_depth = depth;
  bp.learning_rate = tree_lr;
  bp.classes = common.classes;
  bp.seed = common.seed;
  BoostedForest forest = fit_boosted_vectors(x, y, bp);

  std::vector<int> y_true, y_pred;
  std::map<Category, std::pair<std::vector<int>, std::vector<int>>> by_cat;
  for (const auto& p : split.test) {
    Eigen::VectorXd f = baseline_features(p, table, pivots, frng);
    Prediction pred = forest.predict_vector(f);
    y_true.push_back(class_index(p.relation));
    y_pred.push_back(pred.label);
    by_cat[p.category].first.push_back(y_true.back());
    by_cat[p.category].second.push_back(pred.label);
  }
  EvalReport rep;
  rep.classes = forest.classes();
  rep.feature_mask = "baseline(cosine+pivots+difference)";
  rep.embedding_source =
      common.random_dim > 0 ? "random:" + std::to_string(common.random_dim) : common.embeddings;
  rep.overall = report_from_predictions(y_true, y_pred, forest.classes());
  for (const auto& [cat, ys] : by_cat)
    rep.per_category[cat] = report_from_predictions(ys.first, ys.second, forest.classes());

  fs::create_directories(common.out);
  const fs::path out(common.out);
  json cfg = config_json(common, nullptr);
  cfg["k_pivots"] = k_pivots;
  write_file(out / "config.json", cfg.dump(2) + "\n");
  write_report(rep, (out / "baseline_report.json").string(),
               (out / "baseline_report.txt").string());
  print_report(rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"antonym/synonym sub-space distillation pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "INI file with [subcommand] sections; command-line flags win");

  CommonOpts train_common, eval_common, score_common, nn_common, base_common;
  TrainOpts topt;
  std::string model_path, classifier_path, word_a, word_b, nn_word, nn_space = "syn";
  int top_k = 5, k_pivots = 10;
  int base_trees = 200, base_depth = 4;
  double base_tree_lr = 0.1;

  CLI::App* train = app.add_subcommand("train", "train the distiller and the pair classifier");
  add_common(train, train_common, true);
  add_train(train, topt);

  CLI::App* eval = app.add_subcommand("evaluate", "score a test split with trained artifacts");
  add_common(eval, eval_common, true);
  eval->add_option("--model", model_path, "distiller model file")->required();
  eval->add_option("--classifier", classifier_path, "classifier file")->required();

  CLI::App* score = app.add_subcommand("score", "classify one word pair");
  add_common(score, score_common, false);
  score->add_option("--model", model_path, "distiller model file")->required();
  score->add_option("--classifier", classifier_path, "classifier file")->required();
  score->add_option("-a,--word-a", word_a, "first word")->required();
  score->add_option("-b,--word-b", word_b, "second word")->required();

  CLI::App* nn = app.add_subcommand("neighbors", "nearest neighbors in a distilled sub-space");
  add_common(nn, nn_common, false);
  nn->add_option("--model", model_path, "distiller model file")->required();
  nn->add_option("--word", nn_word, "query word")->required();
  nn->add_option("--space", nn_space, "syn | ant")->check(CLI::IsMember({"syn", "ant"}));
  nn->add_option("--top-k", top_k, "neighbors to return");

  CLI::App* base = app.add_subcommand("baseline", "k-means pivot baseline over raw embeddings");
  add_common(base, base_common, true);
  base->add_option("--k-pivots", k_pivots, "number of k-means pivots");
  base->add_option("--trees", base_trees, "boosting rounds");
  base->add_option("--depth", base_depth, "tree depth cap");
  base->add_option("--tree-lr", base_tree_lr, "boosting shrinkage");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") return app.exit(e);
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (*train) return cmd_train(train_common, topt);
    if (*eval) return cmd_evaluate(eval_common, model_path, classifier_path);
    if (*score) return cmd_score(score_common, model_path, classifier_path, word_a, word_b);
    if (*nn) return cmd_neighbors(nn_common, model_path, nn_word, nn_space, top_k);
    if (*base) return cmd_baseline(base_common, k_pivots, base_trees, base_depth, base_tree_lr);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
