#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace burnsight::evalstats {

struct RunMetrics {
  double accuracy = 0.0;
  // Macro averages over classes.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<double> class_precision;
  std::vector<double> class_recall;
  std::vector<double> class_f1;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

// Per-class precision/recall/F1 with 0/0 taken as 0, macro-averaged.
RunMetrics confusion_and_metrics(std::span<const int> predictions, std::span<const int> labels,
                                 int num_classes);

enum class Metric { kAccuracy, kPrecision, kRecall, kF1 };

Metric parse_metric(std::string_view text);
std::string_view to_string(Metric metric);
double metric_value(const RunMetrics& metrics, Metric metric);

struct RunRecord {
  std::uint64_t seed = 0;
  RunMetrics metrics;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) standard deviation; NaN when n < 2
};

// Runs of one feature configuration ("group"), sorted by seed.
struct MetricsReport {
  std::string group;
  std::vector<std::string> class_names;
  std::vector<RunRecord> runs;

  Summary summary(Metric metric) const;
  std::vector<double> values(Metric metric) const;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

Summary summarize(std::span<const double> values);

// Calls run(seed) once per seed (concurrently when parallel is set) and
// collects the records sorted by seed. Requires at least two seeds.
MetricsReport multi_seed_run(std::string group, std::span<const std::uint64_t> seeds,
                             const std::function<RunMetrics(std::uint64_t)>& run, bool parallel = false);

}  // namespace burnsight::evalstats
