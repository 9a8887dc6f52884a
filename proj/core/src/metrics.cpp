#include "burnsight/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "burnsight/error.hpp"
#include "burnsight/parallel.hpp"

namespace burnsight::evalstats {

RunMetrics confusion_and_metrics(std::span<const int> predictions, std::span<const int> labels,
                                 int num_classes) {
  if (predictions.empty()) throw UsageError("metrics need at least one prediction");
  if (predictions.size() != labels.size()) throw UsageError("prediction and label counts differ");
  if (num_classes < 1) throw UsageError("num_classes must be >= 1");
  const auto k = static_cast<std::size_t>(num_classes);
  std::vector<long> confusion(k * k, 0);  // [truth][predicted]
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes || predictions[i] < 0 || predictions[i] >= num_classes) {
      throw UsageError("class index out of range in metrics input");
    }
    ++confusion[labels[i] * k + predictions[i]];
  }

  RunMetrics m;
  long correct = 0;
  for (std::size_t c = 0; c < k; ++c) correct += confusion[c * k + c];
  m.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
  for (std::size_t c = 0; c < k; ++c) {
    long predicted = 0;
    long actual = 0;
    for (std::size_t o = 0; o < k; ++o) {
      predicted += confusion[o * k + c];
      actual += confusion[c * k + o];
    }
    const double tp = static_cast<double>(confusion[c * k + c]);
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = actual > 0 ? tp / actual : 0.0;
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.class_precision.push_back(precision);
    m.class_recall.push_back(recall);
    m.class_f1.push_back(f1);
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  m.precision = mean(m.class_precision);
  m.recall = mean(m.class_recall);
  m.f1 = mean(m.class_f1);
  return m;
}

Metric parse_metric(std::string_view text) {
  if (text == "accuracy") return Metric::kAccuracy;
  if (text == "precision") return Metric::kPrecision;
  if (text == "recall") return Metric::kRecall;
  if (text == "f1") return Metric::kF1;
  throw UsageError("unknown metric '" + std::string(text) + "' (expected accuracy|precision|recall|f1)");
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kAccuracy:
      return "accuracy";
    case Metric::kPrecision:
      return "precision";
    case Metric::kRecall:
      return "recall";
    case Metric::kF1:
      return "f1";
  }
  return "accuracy";
}

double metric_value(const RunMetrics& metrics, Metric metric) {
  switch (metric) {
    case Metric::kAccuracy:
      return metrics.accuracy;
    case Metric::kPrecision:
      return metrics.precision;
    case Metric::kRecall:
      return metrics.recall;
    case Metric::kF1:
      return metrics.f1;
  }
  return metrics.accuracy;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) {
    s.mean = s.std = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  for (const double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() < 2) {
    s.std = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double ss = 0.0;
  for (const double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

std::vector<double> MetricsReport::values(Metric metric) const {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(metric_value(r.metrics, metric));
  return out;
}

Summary MetricsReport::summary(Metric metric) const { return summarize(values(metric)); }

MetricsReport multi_seed_run(std::string group, std::span<const std::uint64_t> seeds,
                             const std::function<RunMetrics(std::uint64_t)>& run, bool parallel) {
  if (seeds.size() < 2) throw UsageError("multi-seed runs need at least 2 seeds for a standard deviation");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw UsageError("seeds must be distinct");
  }
  MetricsReport report;
  report.group = std::move(group);
  report.runs.resize(seeds.size());
  parallel_for(
      seeds.size(), [&](std::size_t i) { report.runs[i] = {seeds[i], run(seeds[i])}; },
      parallel ? thread_count() : 1);
  std::sort(report.runs.begin(), report.runs.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.seed < b.seed; });
  return report;
}

}  // namespace burnsight::evalstats
