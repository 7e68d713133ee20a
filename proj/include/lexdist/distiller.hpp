#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lexdist/dataset.hpp"
#include "lexdist/embedding.hpp"

namespace lexdist {

// Two-hidden-layer feed-forward encoder, sigmoid on both layers. The second
// layer is the distilled sub-space output, sigmoid included, so every
// distilled coordinate lies in (0,1).
struct EncoderParams {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // subspace x hidden
  Eigen::VectorXd b2;  // subspace

  Eigen::Index input_dim() const { return w1.cols(); }
  Eigen::Index hidden_dim() const { return w1.rows(); }
  Eigen::Index output_dim() const { return w2.rows(); }
};

struct SoftmaxHead {
  Eigen::MatrixXd w;  // classes x 2
  Eigen::VectorXd b;  // classes
  Eigen::Index classes() const { return w.rows(); }
};

struct DistillerConfig {
  Eigen::Index input_dim = 0;
  Eigen::Index hidden_units = 80;
  Eigen::Index subspace_dim = 60;
  int classes = 2;
  std::uint64_t seed = 42;
};

struct DistillerModel {
  DistillerConfig config;
  EncoderParams enc_syn;
  EncoderParams enc_ant;
  SoftmaxHead head;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 64;
  int epochs = 200;
  int k_negatives = 5;
  double margin = 1.0;
  int patience = 20;  // early stopping on dev F1; 0 disables
  std::uint64_t seed = 42;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

// Glorot-uniform weights, zero biases; both encoders drawn independently
// from the config seed and never share storage.
DistillerModel init_distiller(const DistillerConfig& cfg);

// sigmoid(w2 * sigmoid(w1 * v + b1) + b2)
Eigen::VectorXd encode(const EncoderParams& p, const Eigen::Ref<const Eigen::VectorXd>& v);

// Row-wise encode of a word matrix (rows are input vectors).
Eigen::MatrixXd encode_all(const EncoderParams& p, const Eigen::Ref<const Eigen::MatrixXd>& x);

// f(a,b) = tanh(<enc_S(a), enc_S(b)>), symmetric.
double syn_logit(const DistillerModel& m, const Eigen::Ref<const Eigen::VectorXd>& a,
                 const Eigen::Ref<const Eigen::VectorXd>& b);

// g(a,b) = tanh(<enc_A(a), enc_S(b)>), not symmetric in general.
double ant_logit(const DistillerModel& m, const Eigen::Ref<const Eigen::VectorXd>& a,
                 const Eigen::Ref<const Eigen::VectorXd>& b);

struct PairScores {
  double synonymy;  // cos(enc_S(a), enc_S(b))
  double antonymy;  // max(cos(enc_A(a), enc_S(b)), cos(enc_A(b), enc_S(a)))
};

PairScores scores(const DistillerModel& m, const Eigen::Ref<const Eigen::VectorXd>& a,
                  const Eigen::Ref<const Eigen::VectorXd>& b);

// --- losses over explicit vector pairs (sums, margin target +1 / -1) ---

using VecPair = std::pair<Eigen::VectorXd, Eigen::VectorXd>;

struct LabeledVecPair {
  Eigen::VectorXd a, b;
  int label;  // class index, see class_index()
};

int class_index(Relation r);
Relation relation_from_class(int cls);

double loss_syn(const DistillerModel& m, std::span<const VecPair> positives,
                std::span<const VecPair> negatives, double margin = 1.0);
double loss_ant(const DistillerModel& m, std::span<const VecPair> positives,
                std::span<const VecPair> negatives, double margin = 1.0);

// Mean cross-entropy of the softmax head over [synonymy, antonymy] scores.
double loss_classifier(const DistillerModel& m, std::span<const LabeledVecPair> batch);

// --- batched training / gradient interface ---

struct PairIdx {
  int a, b;
};
struct LabeledIdx {
  int a, b;
  int label;
};

// A self-contained batch: loss terms reference rows of `inputs`.
struct DistillerBatch {
  Eigen::MatrixXd inputs;  // n_words x input_dim
  std::vector<PairIdx> syn_pos, syn_neg;
  std::vector<PairIdx> ant_pos, ant_neg;
  std::vector<LabeledIdx> labeled;
};

struct LossParts {
  bool syn = true, ant = true, ce = true;
};

struct LossTerms {
  double syn = 0, ant = 0, ce = 0;
  double total() const { return syn + ant + ce; }
};

// Gradients mirror the parameter shapes.
struct DistillerGradients {
  EncoderParams enc_syn, enc_ant;
  SoftmaxHead head;
};

DistillerGradients zero_gradients(const DistillerModel& m);

LossTerms compute_loss(const DistillerModel& m, const DistillerBatch& batch,
                       double margin = 1.0, const LossParts& parts = {});

LossTerms compute_loss_and_gradients(const DistillerModel& m, const DistillerBatch& batch,
                                     DistillerGradients& grads, double margin = 1.0,
                                     const LossParts& parts = {});

// Flat visitation of every trainable tensor; gradients visit identically.
template <class Model, class F>
void visit_params(Model& m, F&& f) {
  f("enc_syn.w1", m.enc_syn.w1.data(), m.enc_syn.w1.size());
  f("enc_syn.b1", m.enc_syn.b1.data(), m.enc_syn.b1.size());
  f("enc_syn.w2", m.enc_syn.w2.data(), m.enc_syn.w2.size());
  f("enc_syn.b2", m.enc_syn.b2.data(), m.enc_syn.b2.size());
  f("enc_ant.w1", m.enc_ant.w1.data(), m.enc_ant.w1.size());
  f("enc_ant.b1", m.enc_ant.b1.data(), m.enc_ant.b1.size());
  f("enc_ant.w2", m.enc_ant.w2.data(), m.enc_ant.w2.size());
  f("enc_ant.b2", m.enc_ant.b2.data(), m.enc_ant.b2.size());
  f("head.w", m.head.w.data(), m.head.w.size());
  f("head.b", m.head.b.data(), m.head.b.size());
}

// --- end-to-end training ---

struct EpochStats {
  int epoch;
  double loss_syn, loss_ant, loss_ce;  // accumulated over the epoch's batches
  double dev_precision, dev_recall, dev_f1;  // macro over classes; 0 if no dev
};

struct TrainResult {
  DistillerModel model;
  std::vector<EpochStats> trace;
  int best_epoch = -1;  // -1 when no dev set / no completed epoch
};

// Minimizes L_S + L_A + L_M with Adam mini-batches. Irrelevant pairs are
// excluded from Phase-I training. Antonyms are symmetry-augmented once,
// negatives are corrupted afresh each epoch from the train vocabulary.
// Returns the parameters of the best dev-F1 epoch (last epoch if no dev).
TrainResult train_distiller(EmbeddingTable& table, const DatasetSplit& data,
                            const DistillerConfig& arch, const TrainConfig& cfg);

void write_trace(const std::vector<EpochStats>& trace, const std::string& path);

// --- serialization (versioned JSON container, documented in README) ---

void save_model(const DistillerModel& m, const std::string& path,
                const std::string& run_config_json = "");
DistillerModel load_model(const std::string& path);

}  // namespace lexdist
