#include "binaq/image.hpp"

#include <algorithm>

namespace binaq {

RasterImage::RasterImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw ShapeError("image dimensions must be at least 1x1, got " +
                         std::to_string(width) + "x" + std::to_string(height));
    }
    pixels_.assign(static_cast<size_t>(width) * height, fill);
}

BinaryImage::BinaryImage(int width, int height, bool foreground_fill)
    : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw ShapeError("image dimensions must be at least 1x1, got " +
                         std::to_string(width) + "x" + std::to_string(height));
    }
    labels_.assign(static_cast<size_t>(width) * height, foreground_fill ? 1 : 0);
}

size_t BinaryImage::foreground_count() const {
    return static_cast<size_t>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

RgbImage::RgbImage(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw ShapeError("image dimensions must be at least 1x1");
    }
    pixels_.assign(static_cast<size_t>(width) * height * 3, 0);
}

void RgbImage::set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    size_t base = (static_cast<size_t>(y) * width_ + x) * 3;
    pixels_[base] = r;
    pixels_[base + 1] = g;
    pixels_[base + 2] = b;
}

BinaryImage decode_binary(const RasterImage& image, Polarity polarity) {
    BinaryImage out(image.width(), image.height());
    const bool dark_fg = polarity == Polarity::DarkIsForeground;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const bool dark = image.at(x, y) < 128;
            out.set(x, y, dark == dark_fg);
        }
    }
    return out;
}

BinaryImage complement(const BinaryImage& image) {
    BinaryImage out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            out.set(x, y, !image.foreground(x, y));
        }
    }
    return out;
}

} // namespace binaq
