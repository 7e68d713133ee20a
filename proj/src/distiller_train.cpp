#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "lexdist/distiller.hpp"
#include "lexdist/errors.hpp"
#include "lexdist/metrics.hpp"
#include "lexdist/rng.hpp"

namespace lexdist {

namespace {

void check_train_config(const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0) throw InputError("train: learning_rate must be positive");
  if (cfg.batch_size <= 0) throw InputError("train: batch_size must be positive");
  if (cfg.epochs < 0) throw InputError("train: epochs must be non-negative");
  if (cfg.k_negatives < 1) throw InputError("train: k_negatives must be >= 1");
  if (cfg.patience < 0) throw InputError("train: patience must be non-negative");
}

// Adam over the flat parameter tensors.
class Adam {
 public:
  Adam(DistillerModel& model, const TrainConfig& cfg) : cfg_(cfg) {
    visit_params(model, [&](const char*, double*, Eigen::Index n) { total_ += n; });
    m_ = Eigen::VectorXd::Zero(total_);
    v_ = Eigen::VectorXd::Zero(total_);
  }

  void step(DistillerModel& model, DistillerGradients& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.adam_beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.adam_beta2, t_);
    std::vector<double*> slabs;
    visit_params(grads, [&](const char*, double* p, Eigen::Index) { slabs.push_back(p); });
    Eigen::Index off = 0;
    std::size_t slab = 0;
    visit_params(model, [&](const char*, double* p, Eigen::Index n) {
      const double* g = slabs[slab++];
      for (Eigen::Index i = 0; i < n; ++i) {
        double& mi = m_[off + i];
        double& vi = v_[off + i];
        mi = cfg_.adam_beta1 * mi + (1.0 - cfg_.adam_beta1) * g[i];
        vi = cfg_.adam_beta2 * vi + (1.0 - cfg_.adam_beta2) * g[i] * g[i];
        p[i] -= cfg_.learning_rate * (mi / bc1) / (std::sqrt(vi / bc2) + cfg_.adam_epsilon);
      }
      off += n;
    });
  }

 private:
  TrainConfig cfg_;
  Eigen::Index total_ = 0;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

// Dev-set macro P/R/F1 of the Phase-I softmax head.
struct DevEval {
  Eigen::MatrixXd inputs;
  std::vector<LabeledIdx> labeled;

  ClassMetrics run(const DistillerModel& model) const {
    if (labeled.empty()) return {};
    Eigen::MatrixXd os = encode_all(model.enc_syn, inputs);
    Eigen::MatrixXd oa = encode_all(model.enc_ant, inputs);
    std::vector<int> y_true, y_pred;
    y_true.reserve(labeled.size());
    for (const auto& l : labeled) {
      const double x1 = cosine(os.row(l.a).transpose(), os.row(l.b).transpose());
      const double x2 = std::max(cosine(oa.row(l.a).transpose(), os.row(l.b).transpose()),
                                 cosine(oa.row(l.b).transpose(), os.row(l.a).transpose()));
      Eigen::VectorXd logits = model.head.w * Eigen::Vector2d(x1, x2) + model.head.b;
      int pred = 0;
      logits.maxCoeff(&pred);
      y_true.push_back(l.label);
      y_pred.push_back(pred);
    }
    CategoryReport rep = report_from_predictions(y_true, y_pred, model.config.classes);
    return rep.macro;
  }
};

}  // namespace

TrainResult train_distiller(EmbeddingTable& table, const DatasetSplit& data,
                            const DistillerConfig& arch, const TrainConfig& cfg) {
  check_train_config(cfg);
  if (table.dim() <= 0) throw InputError("train: embedding table is empty");

  DistillerConfig dims = arch;
  dims.input_dim = table.dim();
  dims.seed = cfg.seed;

  // Phase-I data: synonym/antonym pairs only; antonyms symmetry-augmented.
  std::vector<LabeledPair> syn_pairs, ant_raw;
  for (const auto& p : data.train) {
    if (p.relation == Relation::synonym) syn_pairs.push_back(p);
    if (p.relation == Relation::antonym) ant_raw.push_back(p);
  }
  std::vector<LabeledPair> ant_pairs = augment_antonym_symmetry(ant_raw);
  if (syn_pairs.empty() && ant_pairs.empty())
    throw InputError("train: no synonym or antonym pairs in the training split");

  // Resolve every word up front; OOV rows are seeded once from the run seed.
  // Rows [0, n_train_rows) are the training vocabulary, the corruption pool.
  Rng oov_rng = make_rng(cfg.seed, "train-oov");
  std::unordered_map<std::string, int> word_row;
  std::vector<Eigen::RowVectorXd> rows;
  auto resolve = [&](const std::string& w) -> int {
    auto it = word_row.find(w);
    if (it != word_row.end()) return it->second;
    rows.emplace_back(table.lookup_or_init(w, oov_rng));
    int idx = static_cast<int>(rows.size()) - 1;
    word_row.emplace(w, idx);
    return idx;
  };

  auto resolve_pairs = [&](const std::vector<LabeledPair>& ps) {
    std::vector<PairIdx> r;
    r.reserve(ps.size());
    for (const auto& p : ps) r.push_back({resolve(p.word_a), resolve(p.word_b)});
    return r;
  };
  std::vector<PairIdx> syn = resolve_pairs(syn_pairs);
  std::vector<PairIdx> ant = resolve_pairs(ant_pairs);
  for (const auto& w : data.vocab) resolve(w);
  const int n_train_rows = static_cast<int>(rows.size());

  DevEval dev;
  for (const auto& p : data.dev) {
    int cls = class_index(p.relation);
    if (cls >= dims.classes) continue;
    dev.labeled.push_back({resolve(p.word_a), resolve(p.word_b), cls});
  }

  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(rows.size()), table.dim());
  for (std::size_t i = 0; i < rows.size(); ++i) inputs.row(static_cast<Eigen::Index>(i)) = rows[i];
  dev.inputs = inputs;

  TrainResult result;
  result.model = init_distiller(dims);
  if (cfg.epochs == 0) return result;

  Adam adam(result.model, cfg);
  DistillerModel best;
  double best_f1 = -1;
  int since_best = 0;

  const int n_syn = static_cast<int>(syn.size());
  const int n_ant = static_cast<int>(ant.size());
  const int b = cfg.batch_size;
  const int steps = (std::max(n_syn, n_ant) + b - 1) / b;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng erng = make_rng(cfg.seed, "epoch-" + std::to_string(epoch));

    // Fresh negative corruption each epoch, drawn over the train vocabulary.
    auto corrupt = [&](const std::vector<PairIdx>& pos) {
      if (n_train_rows < 3)
        throw InputError("train: vocabulary of " + std::to_string(n_train_rows) +
                         " cannot avoid corruption collisions");
      std::vector<PairIdx> neg;
      neg.reserve(pos.size() * static_cast<std::size_t>(cfg.k_negatives));
      std::uniform_int_distribution<int> pick_row(0, n_train_rows - 1);
      std::uniform_int_distribution<int> pick_side(0, 1);
      for (const auto& p : pos) {
        for (int i = 0; i < cfg.k_negatives; ++i) {
          while (true) {
            const bool replace_a = pick_side(erng) == 0;
            const int w = pick_row(erng);
            if (w == p.a || w == p.b) continue;  // original pair or equal words
            neg.push_back(replace_a ? PairIdx{w, p.b} : PairIdx{p.a, w});
            break;
          }
        }
      }
      return neg;
    };
    std::vector<PairIdx> syn_neg = corrupt(syn);
    std::vector<PairIdx> ant_neg = corrupt(ant);

    std::vector<int> syn_order(n_syn), ant_order(n_ant);
    std::iota(syn_order.begin(), syn_order.end(), 0);
    std::iota(ant_order.begin(), ant_order.end(), 0);
    std::shuffle(syn_order.begin(), syn_order.end(), erng);
    std::shuffle(ant_order.begin(), ant_order.end(), erng);

    EpochStats stats{};
    stats.epoch = epoch;

    for (int step = 0; step < steps; ++step) {
      DistillerBatch batch;
      std::unordered_map<int, int> local;
      std::vector<int> local_rows;
      auto localize = [&](int global) {
        auto it = local.find(global);
        if (it != local.end()) return it->second;
        int idx = static_cast<int>(local_rows.size());
        local.emplace(global, idx);
        local_rows.push_back(global);
        return idx;
      };
      // Each relation contributes min(B, n) positives per step; the shorter
      // relation cycles through its shuffled order.
      auto add_slice = [&](const std::vector<PairIdx>& pos, const std::vector<PairIdx>& neg,
                           const std::vector<int>& order, std::vector<PairIdx>& out_pos,
                           std::vector<PairIdx>& out_neg, int label) {
        const int n = static_cast<int>(order.size());
        if (n == 0) return;
        const int take = std::min(b, n);
        for (int j = 0; j < take; ++j) {
          const int idx = order[(step * b + j) % n];
          const PairIdx& pr = pos[idx];
          PairIdx lp{localize(pr.a), localize(pr.b)};
          out_pos.push_back(lp);
          batch.labeled.push_back({lp.a, lp.b, label});
          for (int k = 0; k < cfg.k_negatives; ++k) {
            const PairIdx& nr = neg[static_cast<std::size_t>(idx) * cfg.k_negatives + k];
            out_neg.push_back({localize(nr.a), localize(nr.b)});
          }
        }
      };
      add_slice(syn, syn_neg, syn_order, batch.syn_pos, batch.syn_neg,
                class_index(Relation::synonym));
      add_slice(ant, ant_neg, ant_order, batch.ant_pos, batch.ant_neg,
                class_index(Relation::antonym));
      if (batch.labeled.empty()) continue;

      batch.inputs.resize(static_cast<Eigen::Index>(local_rows.size()), table.dim());
      for (std::size_t i = 0; i < local_rows.size(); ++i)
        batch.inputs.row(static_cast<Eigen::Index>(i)) = inputs.row(local_rows[i]);

      DistillerGradients grads;
      LossTerms terms = compute_loss_and_gradients(result.model, batch, grads, cfg.margin);
      if (!std::isfinite(terms.total())) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "train: non-finite loss at epoch %d step %d (L_S=%g L_A=%g L_M=%g)",
                      epoch, step, terms.syn, terms.ant, terms.ce);
        throw std::runtime_error(buf);
      }
      stats.loss_syn += terms.syn;
      stats.loss_ant += terms.ant;
      stats.loss_ce += terms.ce;
      adam.step(result.model, grads);
    }

    if (!dev.labeled.empty()) {
      ClassMetrics m = dev.run(result.model);
      stats.dev_precision = m.precision;
      stats.dev_recall = m.recall;
      stats.dev_f1 = m.f1;
      if (m.f1 > best_f1) {
        best_f1 = m.f1;
        best = result.model;
        result.best_epoch = epoch;
        since_best = 0;
      } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
        result.trace.push_back(stats);
        break;
      }
    }
    result.trace.push_back(stats);
  }

  if (result.best_epoch >= 0) result.model = best;
  return result;
}

void write_trace(const std::vector<EpochStats>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write trace file: " + path);
  out << "epoch\tloss_syn\tloss_ant\tloss_ce\tdev_precision\tdev_recall\tdev_f1\n";
  char buf[256];
  for (const auto& e : trace) {
    std::snprintf(buf, sizeof buf, "%d\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\n", e.epoch,
                  e.loss_syn, e.loss_ant, e.loss_ce, e.dev_precision, e.dev_recall, e.dev_f1);
    out << buf;
  }
}

}  // namespace lexdist
