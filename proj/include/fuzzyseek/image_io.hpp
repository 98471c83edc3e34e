#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "fuzzyseek/color.hpp"

namespace fuzzyseek {

enum class ImageFormat { Unknown, Png, Jpeg, Bmp, PpmAscii, PpmBinary };

/// Sniffs the format from the leading magic bytes.
ImageFormat detect_format(std::span<const unsigned char> head);

/// Decodes PNG, JPEG, BMP (uncompressed 8/24/32-bit) or PPM (P3/P6).
/// PPM samples with maxval != 255 are rescaled to [0,255] with rounding.
/// Throws UnsupportedFormat or CorruptFile; missing files are CorruptFile.
Image decode_image(const std::filesystem::path& path);
Image decode_image_bytes(std::span<const unsigned char> bytes);

Image decode_ppm(std::span<const unsigned char> bytes);

/// ASCII P3, maxval 255, one pixel row per line.
std::string encode_ppm_ascii(const Image& image);
void write_ppm(const Image& image, const std::filesystem::path& path);

}  // namespace fuzzyseek
