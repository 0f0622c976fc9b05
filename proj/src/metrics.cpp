#include "phishtgl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace phishtgl {

double auc_score(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw ShapeError("auc: length mismatch");
  std::size_t pos = 0;
  for (int l : labels) pos += l == 1;
  std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw SingleClassError("auc needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks across ties, accumulate positive-class rank sum.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    i = j;
  }
  double np = static_cast<double>(pos), nn = static_cast<double>(neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

MetricsEntry compute_metrics(const std::vector<double>& scores,
                             const std::vector<int>& labels, double threshold) {
  if (scores.size() != labels.size()) throw ShapeError("metrics: length mismatch");
  if (scores.empty()) throw EmptyInput("metrics: no scores");
  MetricsEntry m;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool predicted = scores[i] > threshold;
    bool actual = labels[i] == 1;
    if (predicted && actual)
      ++m.tp;
    else if (predicted && !actual)
      ++m.fp;
    else if (!predicted && actual)
      ++m.fn;
    else
      ++m.tn;
  }
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.recall = ratio(m.tp, m.tp + m.fn);
  m.fpr = ratio(m.fp, m.fp + m.tn);
  m.fnr = 1.0 - m.recall;
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  double tnr = ratio(m.tn, m.tn + m.fp);
  m.bac = (m.recall + tnr) / 2.0;
  bool both_classes = (m.tp + m.fn) > 0 && (m.tn + m.fp) > 0;
  if (both_classes) m.auc = auc_score(scores, labels);
  return m;
}

const std::vector<std::string>& MetricsReport::metric_names() {
  static const std::vector<std::string> names = {"precision", "recall", "fpr", "fnr",
                                                 "f1",        "auc",    "bac"};
  return names;
}

double metric_value(const MetricsEntry& entry, const std::string& metric) {
  if (metric == "precision") return entry.precision;
  if (metric == "recall") return entry.recall;
  if (metric == "fpr") return entry.fpr;
  if (metric == "fnr") return entry.fnr;
  if (metric == "f1") return entry.f1;
  if (metric == "bac") return entry.bac;
  if (metric == "auc") return entry.auc.value_or(std::nan(""));
  throw ConfigError("unknown metric: " + metric);
}

MetricAggregate MetricsReport::aggregate(const std::string& metric) const {
  MetricAggregate agg;
  std::vector<double> values;
  for (const auto& fold : folds) {
    double v = metric_value(fold, metric);
    if (!std::isnan(v)) values.push_back(v);
  }
  if (values.empty()) return agg;
  agg.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double var = 0;
  for (double v : values) var += (v - agg.mean) * (v - agg.mean);
  agg.stddev = std::sqrt(var / values.size());
  return agg;
}

}  // namespace phishtgl
