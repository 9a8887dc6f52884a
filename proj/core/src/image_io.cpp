#include "burnsight/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "burnsight/error.hpp"

namespace burnsight::imaging {
namespace fs = std::filesystem;

namespace {

using FilePtr = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr file(std::fopen(path.c_str(), mode), &std::fclose);
  if (!file) throw IoError("cannot open '" + path.string() + "'");
  return file;
}

// libpng reports errors through a callback that must not return; we record
// the message and longjmp back to the setjmp point in the caller.
struct PngErrorState {
  std::string message;
};

void png_error_handler(png_structp png, png_const_charp message) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  if (state != nullptr) state->message = message;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

struct PngReadData {
  PngErrorState error;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  bool unsupported = false;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
};

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() {
    if (png != nullptr) png_destroy_read_struct(&png, info != nullptr ? &info : nullptr, nullptr);
  }
};

GrayImage read_png(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  auto data = std::make_unique<PngReadData>();

  PngReadGuard guard;
  guard.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &data->error, png_error_handler,
                                     png_warning_handler);
  if (guard.png == nullptr) throw Error("png_create_read_struct failed");
  guard.info = png_create_info_struct(guard.png);
  if (guard.info == nullptr) throw Error("png_create_info_struct failed");

  if (setjmp(png_jmpbuf(guard.png))) {
    throw FormatError(FormatErrorKind::kMalformed,
                      "'" + path.string() + "': " + data->error.message);
  }

  png_init_io(guard.png, file.get());
  png_read_info(guard.png, guard.info);
  png_get_IHDR(guard.png, guard.info, &data->width, &data->height, &data->bit_depth,
               &data->color_type, nullptr, nullptr, nullptr);
  if (data->color_type != PNG_COLOR_TYPE_GRAY) {
    data->unsupported = true;
  } else {
    if (data->bit_depth < 8) png_set_expand_gray_1_2_4_to_8(guard.png);
    png_read_update_info(guard.png, guard.info);
    const png_size_t row_bytes = png_get_rowbytes(guard.png, guard.info);
    data->buffer.resize(row_bytes * data->height);
    data->rows.resize(data->height);
    for (png_uint_32 y = 0; y < data->height; ++y) data->rows[y] = data->buffer.data() + y * row_bytes;
    png_read_image(guard.png, data->rows.data());
    png_read_end(guard.png, nullptr);
  }

  if (data->unsupported) {
    throw FormatError(FormatErrorKind::kUnsupported,
                      "'" + path.string() + "' is not a grayscale PNG (color type " +
                          std::to_string(data->color_type) + ")");
  }

  const int width = static_cast<int>(data->width);
  const int height = static_cast<int>(data->height);
  std::vector<double> pixels(static_cast<std::size_t>(width) * height);
  if (data->bit_depth == 16) {
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      const unsigned value = (static_cast<unsigned>(data->buffer[2 * i]) << 8) | data->buffer[2 * i + 1];
      pixels[i] = static_cast<double>(value) / 65535.0;
    }
  } else {
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = data->buffer[i] / 255.0;
  }
  return GrayImage(width, height, std::move(pixels));
}

class PgmParser {
 public:
  PgmParser(std::string bytes, std::string name) : bytes_(std::move(bytes)), name_(std::move(name)) {}

  GrayImage parse() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') fail(FormatErrorKind::kBadMagic, "missing P magic");
    const char kind = bytes_[1];
    if (kind == '3' || kind == '6') {
      throw FormatError(FormatErrorKind::kUnsupported, "'" + name_ + "' is a color PPM");
    }
    if (kind != '2' && kind != '5') fail(FormatErrorKind::kUnsupported, "unsupported netpbm kind");
    pos_ = 2;
    const long width = next_int();
    const long height = next_int();
    const long maxval = next_int();
    if (width <= 0 || height <= 0) fail(FormatErrorKind::kMalformed, "non-positive dimensions");
    if (maxval <= 0 || maxval > 65535) fail(FormatErrorKind::kMalformed, "maxval outside [1,65535]");
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<double> pixels(count);
    const double scale = 1.0 / static_cast<double>(maxval);

    if (kind == '5') {
      ++pos_;  // single whitespace after maxval
      const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
      if (bytes_.size() < pos_ + count * sample_bytes) fail(FormatErrorKind::kTruncated, "raster too short");
      const auto* raw = reinterpret_cast<const unsigned char*>(bytes_.data() + pos_);
      for (std::size_t i = 0; i < count; ++i) {
        const long value = sample_bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
        if (value > maxval) fail(FormatErrorKind::kMalformed, "sample exceeds maxval");
        pixels[i] = static_cast<double>(value) * scale;
      }
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        const long value = next_int();
        if (value > maxval) fail(FormatErrorKind::kMalformed, "sample exceeds maxval");
        pixels[i] = static_cast<double>(value) * scale;
      }
    }
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
  }

 private:
  [[noreturn]] void fail(FormatErrorKind kind, const std::string& what) const {
    throw FormatError(kind, "'" + name_ + "': " + what);
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) fail(FormatErrorKind::kTruncated, "unexpected end of header");
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) fail(FormatErrorKind::kMalformed, "integer too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) fail(FormatErrorKind::kMalformed, "expected integer");
    return value;
  }

  std::string bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

struct PngWriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteGuard() {
    if (png != nullptr) png_destroy_write_struct(&png, info != nullptr ? &info : nullptr);
  }
};

void write_png(const fs::path& path, int width, int height, int bit_depth, int color_type,
               const std::vector<png_byte>& buffer) {
  if (width <= 0 || height <= 0) throw UsageError("cannot write an empty PNG");
  FilePtr file = open_file(path, "wb");
  auto error = std::make_unique<PngErrorState>();
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t row_bytes = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(buffer.data() + static_cast<std::size_t>(y) * row_bytes);
  }

  PngWriteGuard guard;
  guard.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, error.get(), png_error_handler,
                                      png_warning_handler);
  if (guard.png == nullptr) throw Error("png_create_write_struct failed");
  guard.info = png_create_info_struct(guard.png);
  if (guard.info == nullptr) throw Error("png_create_info_struct failed");
  if (setjmp(png_jmpbuf(guard.png))) {
    throw IoError("writing '" + path.string() + "': " + error->message);
  }
  png_init_io(guard.png, file.get());
  png_set_IHDR(guard.png, guard.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(guard.png, guard.info);
  png_write_image(guard.png, rows.data());
  png_write_end(guard.png, nullptr);
}

std::uint8_t to_u8(double value) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(value, 0.0, 1.0) * 255.0));
}

}  // namespace

GrayImage load_image(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::array<char, 8> signature{};
  in.read(signature.data(), signature.size());
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got == signature.size() &&
      png_sig_cmp(reinterpret_cast<png_const_bytep>(signature.data()), 0, signature.size()) == 0) {
    in.close();
    return read_png(path);
  }
  if (got >= 2 && signature[0] == 'P') {
    in.seekg(0);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return PgmParser(std::move(bytes), path.string()).parse();
  }
  throw FormatError(FormatErrorKind::kUnsupported,
                    "'" + path.string() + "' is neither PNG nor PGM");
}

void save_png8(const GrayImage& img, const fs::path& path) {
  std::vector<png_byte> buffer(img.size());
  const auto pixels = img.pixels();
  std::transform(pixels.begin(), pixels.end(), buffer.begin(), to_u8);
  write_png(path, img.width(), img.height(), 8, PNG_COLOR_TYPE_GRAY, buffer);
}

void save_png_rgb(const RgbImage& img, const fs::path& path) {
  if (img.rgb.size() != static_cast<std::size_t>(img.width) * img.height * 3) {
    throw UsageError("RGB buffer size does not match dimensions");
  }
  write_png(path, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, img.rgb);
}

void save_png16(int width, int height, std::span<const std::uint16_t> samples,
                const fs::path& path) {
  if (samples.size() != static_cast<std::size_t>(width) * height) {
    throw UsageError("label buffer size does not match dimensions");
  }
  std::vector<png_byte> buffer(samples.size() * 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    buffer[2 * i] = static_cast<png_byte>(samples[i] >> 8);
    buffer[2 * i + 1] = static_cast<png_byte>(samples[i] & 0xff);
  }
  write_png(path, width, height, 16, PNG_COLOR_TYPE_GRAY, buffer);
}

void save_pgm(const GrayImage& img, const fs::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw UsageError("PGM bit depth must be 8 or 16");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const int maxval = bit_depth == 8 ? 255 : 65535;
  out << "P5\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
  for (const double value : img.pixels()) {
    const long sample = std::lround(std::clamp(value, 0.0, 1.0) * maxval);
    if (bit_depth == 8) {
      out.put(static_cast<char>(sample));
    } else {
      out.put(static_cast<char>(sample >> 8));
      out.put(static_cast<char>(sample & 0xff));
    }
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace burnsight::imaging
