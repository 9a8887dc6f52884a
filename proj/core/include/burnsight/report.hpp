#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "burnsight/metrics.hpp"
#include "burnsight/tukey.hpp"

namespace burnsight::evalstats {

// report.json holds one or more groups. Summaries are written for readers
// and verified against the per-run rows on load.
std::string reports_to_json(std::span<const MetricsReport> reports);
std::vector<MetricsReport> reports_from_json(const std::string& text);

void save_reports(const std::filesystem::path& path, std::span<const MetricsReport> reports);
std::vector<MetricsReport> load_reports(const std::filesystem::path& path);

// One row per group: Features, Runs, mean/std of each metric, then mean
// per-class precision, recall and F1.
std::string table1_csv(std::span<const MetricsReport> reports);

// Columns I,J,MD,P-adj,Reject.
std::string tukey_csv(std::span<const TukeyPair> pairs);

std::string format_number(double value);

}  // namespace burnsight::evalstats
