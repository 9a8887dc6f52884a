#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "burnsight/image.hpp"

namespace burnsight::imaging {

// Reads an 8- or 16-bit grayscale PNG, or a binary/ASCII PGM, and divides by
// the format maximum. Colour inputs raise FormatError(kUnsupported).
GrayImage load_image(const std::filesystem::path& path);

// Writes intensities rounded to 8 bits.
void save_png8(const GrayImage& img, const std::filesystem::path& path);
void save_png_rgb(const RgbImage& img, const std::filesystem::path& path);
// Writes raw 16-bit gray samples (label maps).
void save_png16(int width, int height, std::span<const std::uint16_t> samples,
                const std::filesystem::path& path);

// Binary PGM writer, 8-bit (maxval 255) or 16-bit (maxval 65535).
void save_pgm(const GrayImage& img, const std::filesystem::path& path, int bit_depth = 8);

}  // namespace burnsight::imaging
