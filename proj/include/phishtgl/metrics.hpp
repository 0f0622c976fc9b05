#ifndef PHISHTGL_METRICS_HPP_
#define PHISHTGL_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phishtgl/errors.hpp"

namespace phishtgl {

struct MetricsEntry {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0, recall = 0, fpr = 0, fnr = 0, f1 = 0, bac = 0;
  std::optional<double> auc;  // absent when only one class is present
};

// Rank-statistic AUC with average ranks on ties; throws SingleClassError.
double auc_score(const std::vector<double>& scores, const std::vector<int>& labels);

// Confusion metrics at the threshold (predicted positive iff score > t) plus
// AUC when both classes are present.
MetricsEntry compute_metrics(const std::vector<double>& scores,
                             const std::vector<int>& labels, double threshold);

struct MetricAggregate {
  double mean = 0;
  double stddev = 0;  // population std over folds
};

struct MetricsReport {
  std::vector<MetricsEntry> folds;

  MetricAggregate aggregate(const std::string& metric) const;
  static const std::vector<std::string>& metric_names();
};

double metric_value(const MetricsEntry& entry, const std::string& metric);

}  // namespace phishtgl

#endif  // PHISHTGL_METRICS_HPP_
