#include "burnsight/checkpoint.hpp"

#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "burnsight/error.hpp"
#include "json.hpp"

namespace burnsight::model {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'B', 'S', 'C', 'K'};
constexpr std::size_t kPreambleBytes = 4 + 1 + 4;

json header_for(const FusionModel& model) {
  const auto& meta = model.metadata();
  json h;
  h["format"] = "burnsight-checkpoint";
  h["backbone"] = to_string(meta.backbone);
  h["raw_dim"] = meta.raw_dim;
  h["projection_dim"] = kProjectionWidth;
  h["hidden_dim"] = kHiddenWidth;
  h["num_classes"] = kOutputWidth;
  h["v2_dim"] = meta.v2_dim();
  h["feature_selection"] = meta.selection.names();
  h["class_names"] = meta.class_names;
  h["glcm_levels"] = meta.glcm_levels;
  h["v2_shift"] = meta.v2_shift;
  h["v2_scale"] = meta.v2_scale;
  h["parameter_count"] = model.parameter_count();
  return h;
}

[[noreturn]] void malformed(const std::string& what) {
  throw FormatError(FormatErrorKind::kMalformed, "checkpoint header: " + what);
}

ModelMetadata metadata_from(const json& h) {
  ModelMetadata meta;
  try {
    if (h.at("projection_dim").get<int>() != kProjectionWidth) malformed("projection_dim must be 30");
    if (h.at("hidden_dim").get<int>() != kHiddenWidth) malformed("hidden_dim must be 1024");
    if (h.at("num_classes").get<int>() != kOutputWidth) malformed("num_classes must be 3");
    meta.backbone = parse_backbone_kind(h.at("backbone").get<std::string>());
    meta.raw_dim = h.at("raw_dim").get<int>();
    std::string selection;
    for (const auto& name : h.at("feature_selection")) {
      if (!selection.empty()) selection += ',';
      selection += name.get<std::string>();
    }
    meta.selection = texture::FeatureSelection::parse(selection);
    if (meta.v2_dim() != h.at("v2_dim").get<int>()) malformed("v2_dim disagrees with feature_selection");
    meta.class_names = h.at("class_names").get<std::vector<std::string>>();
    meta.glcm_levels = h.at("glcm_levels").get<int>();
    meta.v2_shift = h.at("v2_shift").get<std::vector<double>>();
    meta.v2_scale = h.at("v2_scale").get<std::vector<double>>();
    meta.validate();
  } catch (const json::exception& e) {
    malformed(e.what());
  } catch (const UsageError& e) {
    malformed(e.what());
  }
  return meta;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const FusionModel& model) {
  const std::string header = header_for(model).dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  out.reserve(out.size() + model.parameter_count() * 4);
  for (const double p : model.parameters()) detail::put_f32(out, static_cast<float>(p));
  return out;
}

FusionModel decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(FormatErrorKind::kBadMagic, "expected checkpoint magic 'BSCK'");
  }
  if (bytes.size() < kPreambleBytes) throw FormatError(FormatErrorKind::kTruncated, "checkpoint preamble cut short");
  if (bytes[4] != kCheckpointVersion) {
    throw FormatError(FormatErrorKind::kBadVersion,
                      "checkpoint version " + std::to_string(bytes[4]) + ", expected 1");
  }
  const std::size_t header_len = detail::get_u32(bytes, 5);
  if (bytes.size() < kPreambleBytes + header_len) {
    throw FormatError(FormatErrorKind::kTruncated, "checkpoint header cut short");
  }
  json header;
  try {
    header = json::parse(bytes.begin() + kPreambleBytes, bytes.begin() + kPreambleBytes + header_len);
  } catch (const json::exception& e) {
    malformed(e.what());
  }

  FusionModel model = FusionModel::zeros(metadata_from(header));
  const auto declared = header.value("parameter_count", std::size_t{0});
  if (declared != model.parameter_count()) {
    throw FormatError(FormatErrorKind::kLengthMismatch,
                      "header declares " + std::to_string(declared) + " parameters, dimensions imply " +
                          std::to_string(model.parameter_count()));
  }
  const std::size_t payload = bytes.size() - kPreambleBytes - header_len;
  if (payload != model.parameter_count() * 4) {
    throw FormatError(FormatErrorKind::kLengthMismatch,
                      "checkpoint payload is " + std::to_string(payload) + " bytes, expected " +
                          std::to_string(model.parameter_count() * 4));
  }
  auto params = model.parameters();
  const std::size_t base = kPreambleBytes + header_len;
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] = static_cast<double>(detail::get_f32(bytes, base + 4 * i));
  }
  if (!model.all_finite()) throw FormatError(FormatErrorKind::kMalformed, "checkpoint holds non-finite weights");
  return model;
}

void save_checkpoint(const FusionModel& model, const std::filesystem::path& path) {
  detail::write_file(path, encode_checkpoint(model));
}

FusionModel load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(detail::read_file(path));
}

}  // namespace burnsight::model
