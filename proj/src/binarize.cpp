#include "binaq/binarize.hpp"

#include <algorithm>
#include <cmath>

#include "binaq/errors.hpp"

namespace binaq {

void SauvolaParams::validate() const {
    if (window < 3 || window % 2 == 0) {
        throw ConfigError("sauvola window must be odd and >= 3, got " + std::to_string(window));
    }
    if (!(r > 0.0)) {
        throw ConfigError("sauvola dynamic range r must be > 0");
    }
}

IntegralImage::IntegralImage(const RasterImage& image)
    : width_(image.width()), height_(image.height()) {
    const size_t stride = static_cast<size_t>(width_) + 1;
    sums_.assign(stride * (height_ + 1), 0);
    squares_.assign(stride * (height_ + 1), 0);
    for (int y = 0; y < height_; ++y) {
        std::uint64_t row_sum = 0;
        std::uint64_t row_sq = 0;
        for (int x = 0; x < width_; ++x) {
            const std::uint64_t v = image.at(x, y);
            row_sum += v;
            row_sq += v * v;
            sums_[(y + 1) * stride + x + 1] = sums_[y * stride + x + 1] + row_sum;
            squares_[(y + 1) * stride + x + 1] = squares_[y * stride + x + 1] + row_sq;
        }
    }
}

std::uint64_t IntegralImage::rect_sum(int x0, int y0, int x1, int y1) const {
    return sum_at(x1, y1) - sum_at(x0, y1) - sum_at(x1, y0) + sum_at(x0, y0);
}

std::uint64_t IntegralImage::rect_square_sum(int x0, int y0, int x1, int y1) const {
    return sq_at(x1, y1) - sq_at(x0, y1) - sq_at(x1, y0) + sq_at(x0, y0);
}

IntegralImage::Stats IntegralImage::window_stats(int cx, int cy, int window) const {
    const int half = window / 2;
    const int x0 = std::max(0, cx - half);
    const int y0 = std::max(0, cy - half);
    const int x1 = std::min(width_, cx + half + 1);
    const int y1 = std::min(height_, cy + half + 1);
    const double area = static_cast<double>(x1 - x0) * (y1 - y0);
    const double mean = static_cast<double>(rect_sum(x0, y0, x1, y1)) / area;
    const double sq_mean = static_cast<double>(rect_square_sum(x0, y0, x1, y1)) / area;
    const double variance = sq_mean - mean * mean;
    return {mean, std::sqrt(variance > 0.0 ? variance : 0.0)};
}

IntegralImage integral_stats(const RasterImage& image) { return IntegralImage(image); }

// Between-class variance maximization over the 256-bin histogram.
int otsu_threshold(const RasterImage& image) {
    std::uint64_t hist[256] = {};
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            ++hist[image.at(x, y)];
        }
    }
    const std::uint64_t total = image.pixel_count();
    std::uint64_t total_sum = 0;
    for (int i = 0; i < 256; ++i) total_sum += static_cast<std::uint64_t>(i) * hist[i];

    int lo_t = 0, hi_t = 0;
    double best_sigma = -1.0;
    std::uint64_t w0 = 0, s0 = 0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        s0 += static_cast<std::uint64_t>(t) * hist[t];
        const std::uint64_t w1 = total - w0;
        double sigma = 0.0;
        if (w0 > 0 && w1 > 0) {
            const double m0 = static_cast<double>(s0) / static_cast<double>(w0);
            const double m1 = static_cast<double>(total_sum - s0) / static_cast<double>(w1);
            const double diff = m0 - m1;
            sigma = static_cast<double>(w0) * static_cast<double>(w1) * diff * diff;
        }
        if (sigma > best_sigma) {
            best_sigma = sigma;
            lo_t = hi_t = t;
        } else if (sigma == best_sigma) {
            hi_t = t;
        }
    }
    // Separable histograms maximize the variance on a whole plateau of empty
    // bins; take its midpoint so the cut sits between the modes.
    return (lo_t + hi_t) / 2;
}

BinaryImage binarize_otsu(const RasterImage& image) {
    std::uint8_t lo = 255, hi = 0;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            lo = std::min(lo, image.at(x, y));
            hi = std::max(hi, image.at(x, y));
        }
    }
    BinaryImage out(image.width(), image.height());
    if (lo == hi) {
        return out; // constant image: all background
    }
    const int t = otsu_threshold(image);
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            out.set(x, y, image.at(x, y) <= t);
        }
    }
    return out;
}

ThresholdMap sauvola_threshold_map(const RasterImage& image, const SauvolaParams& params) {
    params.validate();
    const IntegralImage integral(image);
    ThresholdMap map(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const auto stats = integral.window_stats(x, y, params.window);
            map.at(x, y) = stats.mean * (1.0 + params.k * (stats.stddev / params.r - 1.0));
        }
    }
    return map;
}

BinaryImage apply_threshold_map(const RasterImage& image, const ThresholdMap& thresholds) {
    if (thresholds.width() != image.width() || thresholds.height() != image.height()) {
        throw ShapeError("apply_threshold_map: map is " + std::to_string(thresholds.width()) +
                         "x" + std::to_string(thresholds.height()) + " but image is " +
                         std::to_string(image.width()) + "x" + std::to_string(image.height()));
    }
    BinaryImage out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            out.set(x, y, static_cast<double>(image.at(x, y)) < thresholds.at(x, y));
        }
    }
    return out;
}

ThresholdMap multi_window_threshold(const RasterImage& image,
                                    const std::vector<SauvolaParams>& windows,
                                    const std::vector<double>& weights) {
    if (windows.empty()) {
        throw ConfigError("multi_window_threshold: at least one window required");
    }
    if (windows.size() != weights.size()) {
        throw ConfigError("multi_window_threshold: " + std::to_string(windows.size()) +
                          " windows but " + std::to_string(weights.size()) + " weights");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ConfigError("multi_window_threshold: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("multi_window_threshold: weights sum to " + std::to_string(sum) +
                          ", expected 1");
    }

    ThresholdMap fused(image.width(), image.height(), 0.0);
    for (size_t i = 0; i < windows.size(); ++i) {
        const ThresholdMap map = sauvola_threshold_map(image, windows[i]);
        const double w = weights[i];
        for (int y = 0; y < image.height(); ++y) {
            for (int x = 0; x < image.width(); ++x) {
                fused.at(x, y) += w * map.at(x, y);
            }
        }
    }
    return fused;
}

Grid<double> normalize_intensities(const RasterImage& image) {
    Grid<double> out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            out.at(x, y) = static_cast<double>(image.at(x, y)) / 255.0;
        }
    }
    return out;
}

double hinge_loss(const Grid<double>& normalized, const ThresholdMap& thresholds,
                  const BinaryImage& gt, double alpha) {
    if (!normalized.same_shape(thresholds) ||
        normalized.width() != gt.width() || normalized.height() != gt.height()) {
        throw ShapeError("hinge_loss: dimension mismatch");
    }
    if (!(alpha > 0.0)) {
        throw ConfigError("hinge_loss: alpha must be > 0");
    }
    double total = 0.0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            const double b = gt.foreground(x, y) ? -1.0 : 1.0;
            const double margin = 1.0 - alpha * (normalized.at(x, y) - thresholds.at(x, y)) * b;
            total += std::max(margin, 0.0);
        }
    }
    return total / static_cast<double>(gt.pixel_count());
}

} // namespace binaq
