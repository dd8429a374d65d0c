#pragma once

#include <filesystem>

#include "binaq/image.hpp"

namespace binaq {

// Loads a PNG/BMP/TIFF file as 8-bit grayscale. 24-bit color inputs are
// reduced with BT.601 luminance (0.299 R + 0.587 G + 0.114 B), rounded to
// the nearest integer; 8-bit grayscale passes through unchanged.
// Throws IoError for unreadable files, FormatError for unsupported depths.
RasterImage load_image(const std::filesystem::path& path);

// Exact BT.601 reduction of one pixel, integer arithmetic.
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Writes an 8-bit grayscale PNG with foreground = 0, background = 255.
// Round-trips through load_image + decode_binary to an identical image.
void save_binary(const BinaryImage& image, const std::filesystem::path& path);

// Writes an 8-bit grayscale PNG of raw intensities.
void save_raster(const RasterImage& image, const std::filesystem::path& path);

// Writes a 24-bit RGB PNG (error overlays).
void save_rgb(const RgbImage& image, const std::filesystem::path& path);

} // namespace binaq
