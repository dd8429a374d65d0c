#pragma once

#include <cstdint>
#include <vector>

#include "binaq/errors.hpp"

namespace binaq {

// 8-bit grayscale raster, row-major. Immutable by convention once built:
// binarizers and metrics only ever read it.
class RasterImage {
public:
    RasterImage(int width, int height, std::uint8_t fill = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    size_t pixel_count() const { return pixels_.size(); }

    std::uint8_t at(int x, int y) const {
        return pixels_[static_cast<size_t>(y) * width_ + x];
    }
    void set(int x, int y, std::uint8_t value) {
        pixels_[static_cast<size_t>(y) * width_ + x] = value;
    }

    const std::uint8_t* data() const { return pixels_.data(); }
    std::uint8_t* data() { return pixels_.data(); }

    bool operator==(const RasterImage& other) const = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

// Two-label image: 1 = foreground (ink), 0 = background (support).
class BinaryImage {
public:
    BinaryImage(int width, int height, bool foreground_fill = false);

    int width() const { return width_; }
    int height() const { return height_; }
    size_t pixel_count() const { return labels_.size(); }

    bool foreground(int x, int y) const {
        return labels_[static_cast<size_t>(y) * width_ + x] != 0;
    }
    void set(int x, int y, bool foreground) {
        labels_[static_cast<size_t>(y) * width_ + x] = foreground ? 1 : 0;
    }

    size_t foreground_count() const;

    const std::uint8_t* data() const { return labels_.data(); }

    bool operator==(const BinaryImage& other) const = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> labels_;
};

// Interleaved 8-bit RGB raster, used for error overlays.
class RgbImage {
public:
    RgbImage(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
    std::uint8_t channel(int x, int y, int c) const {
        return pixels_[(static_cast<size_t>(y) * width_ + x) * 3 + c];
    }

    const std::uint8_t* data() const { return pixels_.data(); }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

// Decoding convention for bilevel files: DIBCO ground truth is dark ink on
// a light support, but external prediction exports may be inverted.
enum class Polarity {
    DarkIsForeground,
    LightIsForeground,
};

// Intensity < 128 is foreground under the default convention.
BinaryImage decode_binary(const RasterImage& image,
                          Polarity polarity = Polarity::DarkIsForeground);

// Swaps foreground and background labels.
BinaryImage complement(const BinaryImage& image);

} // namespace binaq
