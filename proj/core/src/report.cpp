#include "burnsight/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "binary_io.hpp"
#include "burnsight/error.hpp"
#include "json.hpp"

namespace burnsight::evalstats {

namespace {

using nlohmann::ordered_json;

constexpr int kReportVersion = 1;
constexpr Metric kMetrics[] = {Metric::kAccuracy, Metric::kPrecision, Metric::kRecall, Metric::kF1};

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

[[noreturn]] void malformed(const std::string& what) {
  throw FormatError(FormatErrorKind::kMalformed, "report: " + what);
}

double read_metric(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) malformed(std::string("missing numeric field '") + key + "'");
  const double v = j[key].get<double>();
  if (!(v >= 0.0 && v <= 1.0)) malformed(std::string("field '") + key + "' outside [0, 1]");
  return v;
}

std::vector<double> read_metric_list(const ordered_json& j, const char* key, std::size_t expected) {
  if (!j.contains(key) || !j[key].is_array()) malformed(std::string("missing array '") + key + "'");
  if (j[key].size() != expected) malformed(std::string("array '") + key + "' has the wrong length");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) malformed(std::string("non-numeric entry in '") + key + "'");
    const double x = v.get<double>();
    if (!(x >= 0.0 && x <= 1.0)) malformed(std::string("entry in '") + key + "' outside [0, 1]");
    out.push_back(x);
  }
  return out;
}

bool close(double stored, double recomputed) {
  if (std::isnan(recomputed)) return std::isnan(stored);
  return std::abs(stored - recomputed) <= 1e-12 * std::max(1.0, std::abs(recomputed));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string reports_to_json(std::span<const MetricsReport> reports) {
  ordered_json doc;
  doc["format"] = "burnsight-report";
  doc["version"] = kReportVersion;
  doc["groups"] = ordered_json::array();
  for (const auto& report : reports) {
    ordered_json g;
    g["group"] = report.group;
    g["class_names"] = report.class_names;
    g["runs"] = ordered_json::array();
    for (const auto& run : report.runs) {
      ordered_json r;
      r["seed"] = run.seed;
      r["accuracy"] = run.metrics.accuracy;
      r["precision"] = run.metrics.precision;
      r["recall"] = run.metrics.recall;
      r["f1"] = run.metrics.f1;
      r["class_precision"] = run.metrics.class_precision;
      r["class_recall"] = run.metrics.class_recall;
      r["class_f1"] = run.metrics.class_f1;
      g["runs"].push_back(std::move(r));
    }
    ordered_json summary;
    for (const Metric m : kMetrics) {
      const Summary s = report.summary(m);
      summary[std::string(to_string(m))] = {{"mean", number_or_null(s.mean)}, {"std", number_or_null(s.std)}};
    }
    g["summary"] = std::move(summary);
    doc["groups"].push_back(std::move(g));
  }
  return doc.dump(2) + "\n";
}

std::vector<MetricsReport> reports_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != "burnsight-report") malformed("not a burnsight report");
  if (!doc.contains("version") || doc["version"] != kReportVersion) {
    throw FormatError(FormatErrorKind::kBadVersion, "report: unsupported version");
  }
  if (!doc.contains("groups") || !doc["groups"].is_array()) malformed("missing 'groups' array");

  std::vector<MetricsReport> out;
  for (const auto& g : doc["groups"]) {
    MetricsReport report;
    if (!g.contains("group") || !g["group"].is_string()) malformed("group without a name");
    report.group = g["group"].get<std::string>();
    if (!g.contains("class_names") || !g["class_names"].is_array()) malformed("group without class names");
    for (const auto& c : g["class_names"]) {
      if (!c.is_string()) malformed("class name is not a string");
      report.class_names.push_back(c.get<std::string>());
    }
    const std::size_t k = report.class_names.size();
    if (!g.contains("runs") || !g["runs"].is_array() || g["runs"].empty()) malformed("group without runs");
    for (const auto& r : g["runs"]) {
      if (!r.contains("seed") || !r["seed"].is_number_unsigned()) malformed("run without an unsigned seed");
      RunRecord run;
      run.seed = r["seed"].get<std::uint64_t>();
      run.metrics.accuracy = read_metric(r, "accuracy");
      run.metrics.precision = read_metric(r, "precision");
      run.metrics.recall = read_metric(r, "recall");
      run.metrics.f1 = read_metric(r, "f1");
      run.metrics.class_precision = read_metric_list(r, "class_precision", k);
      run.metrics.class_recall = read_metric_list(r, "class_recall", k);
      run.metrics.class_f1 = read_metric_list(r, "class_f1", k);
      report.runs.push_back(std::move(run));
    }
    if (g.contains("summary")) {
      const auto& summary = g["summary"];
      for (const Metric m : kMetrics) {
        const std::string key(to_string(m));
        if (!summary.contains(key)) malformed("summary lacks '" + key + "'");
        const Summary s = report.summary(m);
        for (const auto& [field, value] : {std::pair{"mean", s.mean}, std::pair{"std", s.std}}) {
          const auto& stored = summary[key][field];
          const double v = stored.is_number() ? stored.get<double>() : std::numeric_limits<double>::quiet_NaN();
          if (!close(v, value)) malformed("summary " + key + "." + field + " does not match the per-run rows");
        }
      }
    }
    out.push_back(std::move(report));
  }
  return out;
}

void save_reports(const std::filesystem::path& path, std::span<const MetricsReport> reports) {
  detail::write_text_file(path, reports_to_json(reports));
}

std::vector<MetricsReport> load_reports(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return reports_from_json(std::string(bytes.begin(), bytes.end()));
}

std::string table1_csv(std::span<const MetricsReport> reports) {
  std::vector<std::string> class_names;
  for (const auto& r : reports) {
    if (class_names.empty()) class_names = r.class_names;
    if (r.class_names != class_names) throw UsageError("reports disagree on class names");
  }
  std::string out = "Features,Runs,Mean Acc,Acc Std,Mean Prec,Prec Std,Mean Rec,Rec Std,Mean F1,F1 Std";
  for (const char* what : {"Prec", "Rec", "F1"}) {
    for (const auto& c : class_names) out += "," + csv_field(std::string(what) + " " + c);
  }
  out += "\n";
  for (const auto& r : reports) {
    out += csv_field(r.group) + "," + std::to_string(r.runs.size());
    for (const Metric m : kMetrics) {
      const Summary s = r.summary(m);
      out += "," + format_number(s.mean) + "," + format_number(s.std);
    }
    using Field = std::vector<double> RunMetrics::*;
    for (const Field field : {&RunMetrics::class_precision, &RunMetrics::class_recall, &RunMetrics::class_f1}) {
      for (std::size_t c = 0; c < class_names.size(); ++c) {
        std::vector<double> v;
        for (const auto& run : r.runs) v.push_back((run.metrics.*field)[c]);
        out += "," + format_number(summarize(v).mean);
      }
    }
    out += "\n";
  }
  return out;
}

std::string tukey_csv(std::span<const TukeyPair> pairs) {
  std::string out = "I,J,MD,P-adj,Reject\n";
  for (const auto& p : pairs) {
    out += csv_field(p.group_i) + "," + csv_field(p.group_j) + "," + format_number(p.mean_difference) + "," +
           format_number(p.p_adj) + "," + (p.reject ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace burnsight::evalstats
