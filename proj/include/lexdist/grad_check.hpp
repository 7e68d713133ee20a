#pragma once

#include <string>

#include "lexdist/distiller.hpp"
#include "lexdist/rng.hpp"

namespace lexdist {

struct GradCheckReport {
  double max_rel_error = 0;
  std::string worst_param;  // e.g. "enc_syn.w1[17]"
  double worst_analytic = 0, worst_numeric = 0;
  int resample_attempts = 0;
  double tolerance = 0;
  bool passed() const { return max_rel_error <= tolerance; }
};

// True when no hinge argument and no antonymy-score max gap is within
// 10*epsilon of its non-differentiable point.
bool is_kink_free(const DistillerModel& m, const DistillerBatch& batch, double epsilon,
                  double margin = 1.0);

// Compares analytic gradients of the selected loss terms against central
// finite differences. The batch inputs are jittered (re-drawn from rng) until
// kink-free, up to 100 attempts; throws if none is found. Intended for small
// models in double precision.
GradCheckReport gradient_check(const DistillerModel& m, DistillerBatch batch, double epsilon,
                               double tolerance, Rng& rng, double margin = 1.0,
                               const LossParts& parts = {});

// Random small batch for checking: n_words rows of uniform [-1,1] inputs and
// uniformly drawn pair indices.
DistillerBatch make_random_batch(Eigen::Index input_dim, int n_words, int n_syn_pos,
                                 int n_syn_neg, int n_ant_pos, int n_ant_neg, int n_labeled,
                                 int classes, Rng& rng);

}  // namespace lexdist
