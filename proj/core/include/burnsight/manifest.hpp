#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace burnsight::imaging {

// Class order is fixed: it defines output neuron indices.
enum class BurnLabel : int { kFullThickness = 0, kPartialThickness = 1, kUnburnt = 2 };
inline constexpr int kNumClasses = 3;
inline constexpr std::array<std::string_view, kNumClasses> kLabelNames = {
    "full_thickness", "partial_thickness", "unburnt"};

enum class Split { kTrain, kVal, kTest };

std::string_view to_string(BurnLabel label);
std::string_view to_string(Split split);
std::optional<BurnLabel> parse_label(std::string_view text);
std::optional<Split> parse_split(std::string_view text);

struct ManifestEntry {
  std::filesystem::path path;  // as written in the CSV (possibly relative)
  BurnLabel label = BurnLabel::kFullThickness;
  Split split = Split::kTrain;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// `path,label,split` CSV. Relative image paths resolve against base_dir, the
// directory holding the manifest file.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const ManifestEntry& entry) const;
  std::vector<std::size_t> indices(Split split) const;
};

// Parses and checks path uniqueness and label/split spelling.
DatasetManifest load_manifest(const std::filesystem::path& csv_path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& csv_path);

// Throws UsageError unless every class has at least one train entry.
void require_all_labels_in_train(const DatasetManifest& manifest);

}  // namespace burnsight::imaging
