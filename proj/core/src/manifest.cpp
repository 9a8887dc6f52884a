#include "burnsight/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "burnsight/error.hpp"

namespace burnsight::imaging {
namespace fs = std::filesystem;

namespace {

// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (const char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string_view to_string(BurnLabel label) { return kLabelNames[static_cast<int>(label)]; }

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

std::optional<BurnLabel> parse_label(std::string_view text) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kLabelNames[i] == text) return static_cast<BurnLabel>(i);
  }
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  if (text == "test") return Split::kTest;
  return std::nullopt;
}

fs::path DatasetManifest::resolve(const ManifestEntry& entry) const {
  return entry.path.is_absolute() ? entry.path : base_dir / entry.path;
}

std::vector<std::size_t> DatasetManifest::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].split == split) out.push_back(i);
  }
  return out;
}

DatasetManifest load_manifest(const fs::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open manifest '" + csv_path.string() + "'");

  DatasetManifest manifest;
  manifest.base_dir = csv_path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "path,label,split") {
        throw FormatError(FormatErrorKind::kMalformed,
                          "manifest header must be 'path,label,split', got '" + line + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = csv_path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 3) {
      throw FormatError(FormatErrorKind::kMalformed, where + ": expected 3 fields");
    }
    const auto label = parse_label(fields[1]);
    if (!label) throw FormatError(FormatErrorKind::kMalformed, where + ": unknown label '" + fields[1] + "'");
    const auto split = parse_split(fields[2]);
    if (!split) throw FormatError(FormatErrorKind::kMalformed, where + ": unknown split '" + fields[2] + "'");
    if (!seen.insert(fields[0]).second) {
      throw FormatError(FormatErrorKind::kMalformed, where + ": duplicate path '" + fields[0] + "'");
    }
    manifest.entries.push_back({fields[0], *label, *split});
  }
  if (line_no == 0) throw FormatError(FormatErrorKind::kMalformed, "empty manifest '" + csv_path.string() + "'");
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest '" + csv_path.string() + "'");
  out << "path,label,split\n";
  for (const auto& entry : manifest.entries) {
    out << csv_field(entry.path.generic_string()) << ',' << to_string(entry.label) << ','
        << to_string(entry.split) << '\n';
  }
  if (!out) throw IoError("failed writing manifest '" + csv_path.string() + "'");
}

void require_all_labels_in_train(const DatasetManifest& manifest) {
  std::array<bool, kNumClasses> present{};
  for (const auto& entry : manifest.entries) {
    if (entry.split == Split::kTrain) present[static_cast<int>(entry.label)] = true;
  }
  for (int i = 0; i < kNumClasses; ++i) {
    if (!present[i]) {
      throw UsageError("train split has no '" + std::string(kLabelNames[i]) + "' entries");
    }
  }
}

}  // namespace burnsight::imaging
