#include "lexdist/grad_check.hpp"

#include <cmath>

#include "lexdist/errors.hpp"

namespace lexdist {

namespace {

// Distances of every non-smooth construct from its kink: hinge arguments
// (ReLU at 0) and the antonymy-score max gap (tie).
std::vector<double> kink_distances(const DistillerModel& m, const DistillerBatch& batch,
                                   double margin) {
  Eigen::MatrixXd os = encode_all(m.enc_syn, batch.inputs);
  Eigen::MatrixXd oa = encode_all(m.enc_ant, batch.inputs);
  std::vector<double> dist;
  auto hinge_args = [&](const std::vector<PairIdx>& idx, bool ant_space, bool positive) {
    const Eigen::MatrixXd& first = ant_space ? oa : os;
    for (const auto& p : idx) {
      const double f = std::tanh(first.row(p.a).dot(os.row(p.b)));
      dist.push_back(std::abs(positive ? margin - f : margin + f));
    }
  };
  hinge_args(batch.syn_pos, false, true);
  hinge_args(batch.syn_neg, false, false);
  hinge_args(batch.ant_pos, true, true);
  hinge_args(batch.ant_neg, true, false);
  for (const auto& l : batch.labeled) {
    const double c1 = cosine(oa.row(l.a).transpose(), os.row(l.b).transpose());
    const double c2 = cosine(oa.row(l.b).transpose(), os.row(l.a).transpose());
    dist.push_back(std::abs(c1 - c2));
  }
  return dist;
}

}  // namespace

bool is_kink_free(const DistillerModel& m, const DistillerBatch& batch, double epsilon,
                  double margin) {
  for (double d : kink_distances(m, batch, margin))
    if (d <= 10.0 * epsilon) return false;
  return true;
}

DistillerBatch make_random_batch(Eigen::Index input_dim, int n_words, int n_syn_pos,
                                 int n_syn_neg, int n_ant_pos, int n_ant_neg, int n_labeled,
                                 int classes, Rng& rng) {
  if (n_words < 2) throw InputError("make_random_batch: need at least 2 words");
  DistillerBatch batch;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  batch.inputs.resize(n_words, input_dim);
  for (Eigen::Index i = 0; i < batch.inputs.rows(); ++i)
    for (Eigen::Index j = 0; j < input_dim; ++j) batch.inputs(i, j) = unit(rng);

  std::uniform_int_distribution<int> pick(0, n_words - 1);
  auto draw_pair = [&]() {
    int a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    return PairIdx{a, b};
  };
  for (int i = 0; i < n_syn_pos; ++i) batch.syn_pos.push_back(draw_pair());
  for (int i = 0; i < n_syn_neg; ++i) batch.syn_neg.push_back(draw_pair());
  for (int i = 0; i < n_ant_pos; ++i) batch.ant_pos.push_back(draw_pair());
  for (int i = 0; i < n_ant_neg; ++i) batch.ant_neg.push_back(draw_pair());
  std::uniform_int_distribution<int> pick_label(0, classes - 1);
  for (int i = 0; i < n_labeled; ++i) {
    PairIdx p = draw_pair();
    batch.labeled.push_back({p.a, p.b, pick_label(rng)});
  }
  return batch;
}

GradCheckReport gradient_check(const DistillerModel& m, DistillerBatch batch, double epsilon,
                               double tolerance, Rng& rng, double margin,
                               const LossParts& parts) {
  GradCheckReport report;
  report.tolerance = tolerance;

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int attempts = 0;
  while (!is_kink_free(m, batch, epsilon, margin)) {
    if (++attempts >= 100)
      throw std::runtime_error("gradient_check: no kink-free batch found in 100 attempts");
    for (Eigen::Index i = 0; i < batch.inputs.rows(); ++i)
      for (Eigen::Index j = 0; j < batch.inputs.cols(); ++j) batch.inputs(i, j) = unit(rng);
  }
  report.resample_attempts = attempts;

  DistillerGradients grads;
  compute_loss_and_gradients(m, batch, grads, margin, parts);

  std::vector<std::pair<const char*, std::pair<double*, Eigen::Index>>> gslabs;
  visit_params(grads, [&](const char* name, double* p, Eigen::Index n) {
    gslabs.emplace_back(name, std::make_pair(p, n));
  });

  DistillerModel probe = m;  // perturbed copy
  std::size_t slab = 0;
  visit_params(probe, [&](const char* name, double* p, Eigen::Index n) {
    const double* g = gslabs[slab++].second.first;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double saved = p[i];
      p[i] = saved + epsilon;
      const double up = compute_loss(probe, batch, margin, parts).total();
      p[i] = saved - epsilon;
      const double down = compute_loss(probe, batch, margin, parts).total();
      p[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double analytic = g[i];
      const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      const double rel = std::abs(analytic - numeric) / scale;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = std::string(name) + "[" + std::to_string(i) + "]";
        report.worst_analytic = analytic;
        report.worst_numeric = numeric;
      }
    }
  });
  return report;
}

}  // namespace lexdist
