#include "burnsight/fvec.hpp"

#include <fstream>

#include "binary_io.hpp"
#include "burnsight/error.hpp"
#include "json.hpp"

namespace burnsight::model {
namespace {

constexpr char kMagic[4] = {'F', 'V', 'E', 'C'};
constexpr std::size_t kHeaderBytes = 4 + 1 + 4 + 4;

FvecHeader parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(FormatErrorKind::kBadMagic, "expected FVEC magic 'FVEC'");
  }
  if (bytes.size() < kHeaderBytes) {
    throw FormatError(FormatErrorKind::kTruncated, "FVEC header is " + std::to_string(bytes.size()) +
                                                       " bytes, need " + std::to_string(kHeaderBytes));
  }
  if (bytes[4] != kFvecVersion) {
    throw FormatError(FormatErrorKind::kBadVersion,
                      "FVEC version " + std::to_string(bytes[4]) + ", expected 1");
  }
  const std::uint32_t dim = detail::get_u32(bytes, 5);
  const std::uint32_t count = detail::get_u32(bytes, 9);
  if (dim == 0) throw FormatError(FormatErrorKind::kMalformed, "FVEC dimension is 0");
  return {static_cast<int>(dim), count};
}

}  // namespace

std::vector<std::uint8_t> encode_fvec(const FeatureMatrix& matrix) {
  if (matrix.dim == 0) throw UsageError("FVEC dimension must be >= 1");
  if (matrix.values.size() % matrix.dim != 0) throw UsageError("FVEC values are not a whole number of rows");
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(kFvecVersion);
  detail::put_u32(out, matrix.dim);
  detail::put_u32(out, static_cast<std::uint32_t>(matrix.count()));
  out.reserve(out.size() + matrix.values.size() * 4);
  for (const float v : matrix.values) detail::put_f32(out, v);
  return out;
}

FeatureMatrix decode_fvec(std::span<const std::uint8_t> bytes) {
  const FvecHeader header = parse_header(bytes);
  const std::size_t expected = kHeaderBytes + header.count * static_cast<std::size_t>(header.dim) * 4;
  if (bytes.size() != expected) {
    throw FormatError(FormatErrorKind::kLengthMismatch,
                      "FVEC payload is " + std::to_string(bytes.size()) + " bytes, header implies " +
                          std::to_string(expected));
  }
  FeatureMatrix matrix;
  matrix.dim = static_cast<std::uint32_t>(header.dim);
  matrix.values.resize(header.count * header.dim);
  for (std::size_t i = 0; i < matrix.values.size(); ++i) {
    matrix.values[i] = detail::get_f32(bytes, kHeaderBytes + 4 * i);
  }
  return matrix;
}

std::filesystem::path fvec_sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void save_fvec(const FeatureMatrix& matrix, const std::filesystem::path& path,
               const std::map<std::string, std::string>& metadata) {
  detail::write_file(path, encode_fvec(matrix));
  nlohmann::json sidecar = nlohmann::json::object();
  for (const auto& [key, value] : metadata) sidecar[key] = value;
  sidecar["dim"] = matrix.dim;
  sidecar["count"] = matrix.count();
  std::ofstream out(fvec_sidecar_path(path));
  if (!out) throw IoError("cannot write FVEC sidecar for '" + path.string() + "'");
  out << sidecar.dump(2) << '\n';
}

FeatureMatrix load_fvec(const std::filesystem::path& path) {
  return decode_fvec(detail::read_file(path));
}

FvecHeader read_fvec_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> head(kHeaderBytes);
  in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  return parse_header(head);
}

}  // namespace burnsight::model
