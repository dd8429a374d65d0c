#pragma once

#include <cstdint>
#include <vector>

#include "binaq/grid.hpp"
#include "binaq/image.hpp"

namespace binaq {

// Sauvola hyper-parameters: window size, sensitivity k, dynamic range R.
struct SauvolaParams {
    int window = 25;
    double k = 0.2;
    double r = 128.0;

    // Throws ConfigError unless window is odd and >= 3 and r > 0.
    void validate() const;
};

// Per-pixel threshold surface; a pixel is ink when strictly below it.
using ThresholdMap = Grid<double>;

// Cumulative sums and squared sums with a zero border row/column; any
// rectangle sum is recovered exactly by four lookups (integer accumulation).
class IntegralImage {
public:
    explicit IntegralImage(const RasterImage& image);

    int width() const { return width_; }
    int height() const { return height_; }

    // Half-open rectangle [x0,x1) x [y0,y1); caller keeps it inside bounds.
    std::uint64_t rect_sum(int x0, int y0, int x1, int y1) const;
    std::uint64_t rect_square_sum(int x0, int y0, int x1, int y1) const;

    struct Stats {
        double mean;
        double stddev; // population standard deviation
    };

    // Statistics of the window centered at (cx, cy), clamped to the image.
    Stats window_stats(int cx, int cy, int window) const;

private:
    std::uint64_t sum_at(int x, int y) const { return sums_[static_cast<size_t>(y) * (width_ + 1) + x]; }
    std::uint64_t sq_at(int x, int y) const { return squares_[static_cast<size_t>(y) * (width_ + 1) + x]; }

    int width_;
    int height_;
    std::vector<std::uint64_t> sums_;
    std::vector<std::uint64_t> squares_;
};

IntegralImage integral_stats(const RasterImage& image);

// Threshold maximizing between-class variance of the 256-bin histogram
// (midpoint of the maximizing plateau when several thresholds tie).
// Applying it means "intensity <= t is foreground".
int otsu_threshold(const RasterImage& image);

// Global Otsu binarization; constant images come out all-background.
BinaryImage binarize_otsu(const RasterImage& image);

// T = m * (1 + k * (s/R - 1)) per pixel from clamped-window statistics.
ThresholdMap sauvola_threshold_map(const RasterImage& image, const SauvolaParams& params);

// intensity < T -> foreground. Throws ShapeError on mismatch.
BinaryImage apply_threshold_map(const RasterImage& image, const ThresholdMap& thresholds);

// Pixel-wise convex fusion of per-window Sauvola threshold maps.
// Throws ConfigError when the weights are invalid.
ThresholdMap multi_window_threshold(const RasterImage& image,
                                    const std::vector<SauvolaParams>& windows,
                                    const std::vector<double>& weights);

// Intensities scaled to [0,1] for the hinge scorer.
Grid<double> normalize_intensities(const RasterImage& image);

// Mean of max(1 - alpha * (D - T) * B, 0) with B = -1 on foreground and
// +1 on background. D must be normalized to [0,1] and T in the same scale.
double hinge_loss(const Grid<double>& normalized, const ThresholdMap& thresholds,
                  const BinaryImage& gt, double alpha = 16.0);

} // namespace binaq
