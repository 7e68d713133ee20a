#include "lexdist/distiller.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "lexdist/errors.hpp"
#include "lexdist/rng.hpp"

namespace lexdist {

namespace {

using json = nlohmann::ordered_json;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::MatrixXd sigmoid(Eigen::MatrixXd m) {
  return m.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

Eigen::MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

void check_config(const DistillerConfig& cfg) {
  if (cfg.input_dim <= 0) throw InputError("distiller: input_dim must be positive");
  if (cfg.hidden_units <= 0) throw InputError("distiller: hidden_units must be positive");
  if (cfg.subspace_dim <= 0) throw InputError("distiller: subspace_dim must be positive");
  if (cfg.classes != 2 && cfg.classes != 3) throw InputError("distiller: classes must be 2 or 3");
}

void check_dim(const EncoderParams& p, Eigen::Index got) {
  if (got != p.input_dim())
    throw InputError("encoder: input has dimension " + std::to_string(got) + ", expected " +
                     std::to_string(p.input_dim()));
}

double hinge(double x) { return x > 0 ? x : 0; }

// Stable softmax cross-entropy: returns -log p(label) and optionally p.
double softmax_ce(const Eigen::VectorXd& logits, int label, Eigen::VectorXd* probs_out) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp();
  const double z = e.sum();
  if (probs_out) *probs_out = e / z;
  return std::log(z) + m - logits[label];
}

// d cos(u,w) scaled by coef, accumulated into rows of the two output
// gradient matrices. Degenerate norms mean the score was pinned to 0; no
// gradient flows.
void add_cosine_grad(double coef, const Eigen::RowVectorXd& u, const Eigen::RowVectorXd& w,
                     Eigen::MatrixXd& du_mat, int du_row, Eigen::MatrixXd& dw_mat, int dw_row) {
  const double nu = u.norm();
  const double nw = w.norm();
  if (nu < 1e-12 || nw < 1e-12) return;
  const double inv = 1.0 / (nu * nw);
  const double c = u.dot(w) * inv;
  du_mat.row(du_row) += coef * (w * inv - u * (c / (nu * nu)));
  dw_mat.row(dw_row) += coef * (u * inv - w * (c / (nw * nw)));
}

struct EncoderForward {
  Eigen::MatrixXd h;  // n x hidden
  Eigen::MatrixXd o;  // n x subspace
};

EncoderForward forward_all(const EncoderParams& p, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  check_dim(p, x.cols());
  EncoderForward f;
  f.h = sigmoid(((x * p.w1.transpose()).rowwise() + p.b1.transpose()).eval());
  f.o = sigmoid(((f.h * p.w2.transpose()).rowwise() + p.b2.transpose()).eval());
  return f;
}

// dL/dO -> parameter gradients, via the cached forward activations.
void backprop_encoder(const EncoderParams& p, const Eigen::Ref<const Eigen::MatrixXd>& x,
                      const EncoderForward& f, const Eigen::MatrixXd& d_out,
                      EncoderParams& grad) {
  Eigen::MatrixXd dz2 = d_out.cwiseProduct(f.o.cwiseProduct((1.0 - f.o.array()).matrix()));
  grad.w2 += dz2.transpose() * f.h;
  grad.b2 += dz2.colwise().sum().transpose();
  Eigen::MatrixXd dh = dz2 * p.w2;
  Eigen::MatrixXd dz1 = dh.cwiseProduct(f.h.cwiseProduct((1.0 - f.h.array()).matrix()));
  grad.w1 += dz1.transpose() * x;
  grad.b1 += dz1.colwise().sum().transpose();
}

void check_batch(const DistillerModel& m, const DistillerBatch& batch) {
  if (batch.inputs.cols() != m.config.input_dim)
    throw InputError("batch inputs have dimension " + std::to_string(batch.inputs.cols()) +
                     ", model expects " + std::to_string(m.config.input_dim));
  const int n = static_cast<int>(batch.inputs.rows());
  auto check_idx = [&](int i) {
    if (i < 0 || i >= n) throw InputError("batch pair index out of range");
  };
  for (const auto* list : {&batch.syn_pos, &batch.syn_neg, &batch.ant_pos, &batch.ant_neg})
    for (const auto& p : *list) {
      check_idx(p.a);
      check_idx(p.b);
    }
  for (const auto& l : batch.labeled) {
    check_idx(l.a);
    check_idx(l.b);
    if (l.label < 0 || l.label >= m.config.classes)
      throw InputError("label " + std::to_string(l.label) + " out of range for " +
                       std::to_string(m.config.classes) + " classes");
  }
}

LossTerms compute_impl(const DistillerModel& m, const DistillerBatch& batch, double margin,
                       const LossParts& parts, DistillerGradients* grads) {
  check_batch(m, batch);
  const auto& x = batch.inputs;
  EncoderForward fs = forward_all(m.enc_syn, x);
  EncoderForward fa = forward_all(m.enc_ant, x);

  Eigen::MatrixXd d_os, d_oa;
  if (grads) {
    d_os = Eigen::MatrixXd::Zero(fs.o.rows(), fs.o.cols());
    d_oa = Eigen::MatrixXd::Zero(fa.o.rows(), fa.o.cols());
  }

  LossTerms terms;

  // Margin terms: positives pulled past +margin, corrupted pairs pushed
  // below -margin. Antonym terms read the first word in ANT space.
  auto hinge_block = [&](const std::vector<PairIdx>& idx, bool ant_space, bool positive,
                         double& acc) {
    const Eigen::MatrixXd& first = ant_space ? fa.o : fs.o;
    Eigen::MatrixXd* d_first = ant_space ? &d_oa : &d_os;
    for (const auto& pr : idx) {
      Eigen::RowVectorXd u = first.row(pr.a);
      Eigen::RowVectorXd w = fs.o.row(pr.b);
      const double f = std::tanh(u.dot(w));
      const double arg = positive ? margin - f : margin + f;
      if (arg > 0) {
        acc += arg;
        if (grads) {
          const double ds = (positive ? -1.0 : 1.0) * (1.0 - f * f);
          d_first->row(pr.a) += ds * w;
          d_os.row(pr.b) += ds * u;
        }
      }
    }
  };

  if (parts.syn) {
    hinge_block(batch.syn_pos, false, true, terms.syn);
    hinge_block(batch.syn_neg, false, false, terms.syn);
  }
  if (parts.ant) {
    hinge_block(batch.ant_pos, true, true, terms.ant);
    hinge_block(batch.ant_neg, true, false, terms.ant);
  }

  if (parts.ce && !batch.labeled.empty()) {
    const double inv_n = 1.0 / static_cast<double>(batch.labeled.size());
    for (const auto& l : batch.labeled) {
      Eigen::RowVectorXd u = fs.o.row(l.a);
      Eigen::RowVectorXd w = fs.o.row(l.b);
      Eigen::RowVectorXd p = fa.o.row(l.a);
      Eigen::RowVectorXd q = fa.o.row(l.b);
      const double x1 = cosine(u.transpose(), w.transpose());
      const double c1 = cosine(p.transpose(), w.transpose());
      const double c2 = cosine(q.transpose(), u.transpose());
      const bool first_arm = c1 >= c2;  // ties route to the first argument
      const double x2 = first_arm ? c1 : c2;

      Eigen::Vector2d feat(x1, x2);
      Eigen::VectorXd logits = m.head.w * feat + m.head.b;
      Eigen::VectorXd probs;
      terms.ce += inv_n * softmax_ce(logits, l.label, grads ? &probs : nullptr);

      if (grads) {
        Eigen::VectorXd dlogits = probs * inv_n;
        dlogits[l.label] -= inv_n;
        grads->head.w += dlogits * feat.transpose();
        grads->head.b += dlogits;
        Eigen::Vector2d dfeat = m.head.w.transpose() * dlogits;
        add_cosine_grad(dfeat[0], u, w, d_os, l.a, d_os, l.b);
        if (first_arm)
          add_cosine_grad(dfeat[1], p, w, d_oa, l.a, d_os, l.b);
        else
          add_cosine_grad(dfeat[1], q, u, d_oa, l.b, d_os, l.a);
      }
    }
  }

  if (grads) {
    backprop_encoder(m.enc_syn, x, fs, d_os, grads->enc_syn);
    backprop_encoder(m.enc_ant, x, fa, d_oa, grads->enc_ant);
  }
  return terms;
}

EncoderParams zero_like(const EncoderParams& p) {
  EncoderParams z;
  z.w1 = Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols());
  z.b1 = Eigen::VectorXd::Zero(p.b1.size());
  z.w2 = Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols());
  z.b2 = Eigen::VectorXd::Zero(p.b2.size());
  return z;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw InputError("model file: " + name + " has wrong shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InputError("model file: " + name + " has wrong shape");
    for (Eigen::Index c = 0; c < cols; ++c) {
      double v = row[static_cast<std::size_t>(c)].get<double>();
      if (!std::isfinite(v)) throw InputError("model file: non-finite entry in " + name);
      m(i, c) = v;
    }
  }
  return m;
}

json encoder_to_json(const EncoderParams& p) {
  json j;
  j["w1"] = matrix_to_json(p.w1);
  j["b1"] = matrix_to_json(p.b1);
  j["w2"] = matrix_to_json(p.w2);
  j["b2"] = matrix_to_json(p.b2);
  return j;
}

EncoderParams encoder_from_json(const json& j, const DistillerConfig& cfg,
                                const std::string& name) {
  EncoderParams p;
  p.w1 = matrix_from_json(j.at("w1"), cfg.hidden_units, cfg.input_dim, name + ".w1");
  p.b1 = matrix_from_json(j.at("b1"), cfg.hidden_units, 1, name + ".b1");
  p.w2 = matrix_from_json(j.at("w2"), cfg.subspace_dim, cfg.hidden_units, name + ".w2");
  p.b2 = matrix_from_json(j.at("b2"), cfg.subspace_dim, 1, name + ".b2");
  return p;
}

constexpr const char* kModelFormat = "lexdist-distiller";
constexpr int kModelVersion = 1;

}  // namespace

int class_index(Relation r) {
  switch (r) {
    case Relation::synonym: return 0;
    case Relation::antonym: return 1;
    case Relation::irrelevant: return 2;
  }
  return -1;
}

Relation relation_from_class(int cls) {
  switch (cls) {
    case 0: return Relation::synonym;
    case 1: return Relation::antonym;
    case 2: return Relation::irrelevant;
  }
  throw InputError("class index " + std::to_string(cls) + " out of range");
}

DistillerModel init_distiller(const DistillerConfig& cfg) {
  check_config(cfg);
  DistillerModel m;
  m.config = cfg;
  Rng rng = make_rng(cfg.seed, "distiller-init");
  auto init_encoder = [&](EncoderParams& p) {
    p.w1 = glorot(cfg.hidden_units, cfg.input_dim, rng);
    p.b1 = Eigen::VectorXd::Zero(cfg.hidden_units);
    p.w2 = glorot(cfg.subspace_dim, cfg.hidden_units, rng);
    p.b2 = Eigen::VectorXd::Zero(cfg.subspace_dim);
  };
  init_encoder(m.enc_syn);
  init_encoder(m.enc_ant);
  // The head inputs have fixed meanings ([synonymy, antonymy]); start it in
  // the canonical orientation so the cross-entropy term reinforces the hinge
  // losses instead of settling on a sign-flipped separation.
  m.head.w = Eigen::MatrixXd::Zero(cfg.classes, 2);
  m.head.w(0, 0) = 1.0;
  m.head.w(0, 1) = -1.0;
  m.head.w(1, 0) = -1.0;
  m.head.w(1, 1) = 1.0;
  m.head.b = Eigen::VectorXd::Zero(cfg.classes);
  return m;
}

Eigen::VectorXd encode(const EncoderParams& p, const Eigen::Ref<const Eigen::VectorXd>& v) {
  check_dim(p, v.size());
  Eigen::VectorXd h = (p.w1 * v + p.b1).unaryExpr([](double x) { return sigmoid(x); });
  return (p.w2 * h + p.b2).unaryExpr([](double x) { return sigmoid(x); });
}

Eigen::MatrixXd encode_all(const EncoderParams& p, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  return forward_all(p, x).o;
}

double syn_logit(const DistillerModel& m, const Eigen::Ref<const Eigen::VectorXd>& a,
                 const Eigen::Ref<const Eigen::VectorXd>& b) {
  return std::tanh(encode(m.enc_syn, a).dot(encode(m.enc_syn, b)));
}

double ant_logit(const DistillerModel& m, const Eigen::Ref<const Eigen::VectorXd>& a,
                 const Eigen::Ref<const Eigen::VectorXd>& b) {
  return std::tanh(encode(m.enc_ant, a).dot(encode(m.enc_syn, b)));
}

PairScores scores(const DistillerModel& m, const Eigen::Ref<const Eigen::VectorXd>& a,
                  const Eigen::Ref<const Eigen::VectorXd>& b) {
  Eigen::VectorXd u = encode(m.enc_syn, a);
  Eigen::VectorXd w = encode(m.enc_syn, b);
  Eigen::VectorXd p = encode(m.enc_ant, a);
  Eigen::VectorXd q = encode(m.enc_ant, b);
  return {cosine(u, w), std::max(cosine(p, w), cosine(q, u))};
}

double loss_syn(const DistillerModel& m, std::span<const VecPair> positives,
                std::span<const VecPair> negatives, double margin) {
  double acc = 0;
  for (const auto& [a, b] : positives) acc += hinge(margin - syn_logit(m, a, b));
  for (const auto& [a, b] : negatives) acc += hinge(margin + syn_logit(m, a, b));
  return acc;
}

double loss_ant(const DistillerModel& m, std::span<const VecPair> positives,
                std::span<const VecPair> negatives, double margin) {
  double acc = 0;
  for (const auto& [a, b] : positives) acc += hinge(margin - ant_logit(m, a, b));
  for (const auto& [a, b] : negatives) acc += hinge(margin + ant_logit(m, a, b));
  return acc;
}

double loss_classifier(const DistillerModel& m, std::span<const LabeledVecPair> batch) {
  if (batch.empty()) throw InputError("loss_classifier: empty batch");
  double acc = 0;
  for (const auto& ex : batch) {
    if (ex.label < 0 || ex.label >= m.config.classes)
      throw InputError("loss_classifier: label out of range");
    PairScores s = scores(m, ex.a, ex.b);
    Eigen::VectorXd logits = m.head.w * Eigen::Vector2d(s.synonymy, s.antonymy) + m.head.b;
    acc += softmax_ce(logits, ex.label, nullptr);
  }
  return acc / static_cast<double>(batch.size());
}

DistillerGradients zero_gradients(const DistillerModel& m) {
  DistillerGradients g;
  g.enc_syn = zero_like(m.enc_syn);
  g.enc_ant = zero_like(m.enc_ant);
  g.head.w = Eigen::MatrixXd::Zero(m.head.w.rows(), m.head.w.cols());
  g.head.b = Eigen::VectorXd::Zero(m.head.b.size());
  return g;
}

LossTerms compute_loss(const DistillerModel& m, const DistillerBatch& batch, double margin,
                       const LossParts& parts) {
  return compute_impl(m, batch, margin, parts, nullptr);
}

LossTerms compute_loss_and_gradients(const DistillerModel& m, const DistillerBatch& batch,
                                     DistillerGradients& grads, double margin,
                                     const LossParts& parts) {
  grads = zero_gradients(m);
  return compute_impl(m, batch, margin, parts, &grads);
}

void save_model(const DistillerModel& m, const std::string& path,
                const std::string& run_config_json) {
  json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["config"] = {{"input_dim", m.config.input_dim},
                 {"hidden_units", m.config.hidden_units},
                 {"subspace_dim", m.config.subspace_dim},
                 {"classes", m.config.classes},
                 {"seed", m.config.seed}};
  j["enc_syn"] = encoder_to_json(m.enc_syn);
  j["enc_ant"] = encoder_to_json(m.enc_ant);
  j["head"] = {{"w", matrix_to_json(m.head.w)}, {"b", matrix_to_json(m.head.b)}};
  if (!run_config_json.empty()) j["run_config"] = json::parse(run_config_json);
  std::ofstream out(path);
  if (!out) throw InputError("cannot write model file: " + path);
  out << j.dump() << '\n';
  if (!out) throw InputError("write failed: " + path);
}

DistillerModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("corrupt model file " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kModelFormat)
      throw InputError("not a distiller model file: " + path);
    if (j.at("version").get<int>() != kModelVersion)
      throw InputError("unsupported model version in " + path);
    DistillerModel m;
    const auto& c = j.at("config");
    m.config.input_dim = c.at("input_dim").get<Eigen::Index>();
    m.config.hidden_units = c.at("hidden_units").get<Eigen::Index>();
    m.config.subspace_dim = c.at("subspace_dim").get<Eigen::Index>();
    m.config.classes = c.at("classes").get<int>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    check_config(m.config);
    m.enc_syn = encoder_from_json(j.at("enc_syn"), m.config, "enc_syn");
    m.enc_ant = encoder_from_json(j.at("enc_ant"), m.config, "enc_ant");
    m.head.w = matrix_from_json(j.at("head").at("w"), m.config.classes, 2, "head.w");
    m.head.b = matrix_from_json(j.at("head").at("b"), m.config.classes, 1, "head.b");
    return m;
  } catch (const json::exception& e) {
    throw InputError("corrupt model file " + path + ": " + e.what());
  }
}

}  // namespace lexdist
