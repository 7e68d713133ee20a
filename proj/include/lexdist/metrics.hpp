#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lexdist {

struct ClassMetrics {
  double precision = 0, recall = 0, f1 = 0;
  int support = 0;
};

struct CategoryReport {
  Eigen::MatrixXi confusion;  // rows: true class, cols: predicted
  std::vector<ClassMetrics> per_class;
  ClassMetrics macro;  // unweighted mean of per-class P, R, F1
  int total = 0;
};

// P = tp/(tp+fp), R = tp/(tp+fn), F1 = 2PR/(P+R); each 0 when undefined.
CategoryReport report_from_predictions(const std::vector<int>& y_true,
                                       const std::vector<int>& y_pred, int classes);

}  // namespace lexdist
