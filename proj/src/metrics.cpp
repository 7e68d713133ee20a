#include "lexdist/metrics.hpp"

#include "lexdist/errors.hpp"

namespace lexdist {

CategoryReport report_from_predictions(const std::vector<int>& y_true,
                                       const std::vector<int>& y_pred, int classes) {
  if (y_true.size() != y_pred.size())
    throw InputError("report_from_predictions: length mismatch");
  if (classes < 2) throw InputError("report_from_predictions: need at least 2 classes");

  CategoryReport rep;
  rep.confusion = Eigen::MatrixXi::Zero(classes, classes);
  rep.total = static_cast<int>(y_true.size());
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] < 0 || y_true[i] >= classes || y_pred[i] < 0 || y_pred[i] >= classes)
      throw InputError("report_from_predictions: class index out of range");
    rep.confusion(y_true[i], y_pred[i]) += 1;
  }

  rep.per_class.resize(classes);
  for (int c = 0; c < classes; ++c) {
    const int tp = rep.confusion(c, c);
    const int support = rep.confusion.row(c).sum();
    const int predicted = rep.confusion.col(c).sum();
    ClassMetrics& m = rep.per_class[c];
    m.support = support;
    m.precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
    m.recall = support > 0 ? static_cast<double>(tp) / support : 0.0;
    m.f1 = (m.precision + m.recall) > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
    rep.macro.precision += m.precision / classes;
    rep.macro.recall += m.recall / classes;
    rep.macro.f1 += m.f1 / classes;
  }
  rep.macro.support = rep.total;
  return rep;
}

}  // namespace lexdist
