#pragma once

#include <cstdint>
#include <cmath>

#include "binaq/grid.hpp"
#include "binaq/image.hpp"

namespace binaq {

// Per-pixel Euclidean distance to the nearest foreground pixel of a
// reference image. Squared distances are kept as integers so equality
// against a brute-force search is exact.
class DistanceField {
public:
    DistanceField() = default;
    explicit DistanceField(Grid<std::int64_t> squared) : squared_(std::move(squared)) {}

    int width() const { return squared_.width(); }
    int height() const { return squared_.height(); }

    std::int64_t squared(int x, int y) const { return squared_.at(x, y); }
    double at(int x, int y) const { return std::sqrt(static_cast<double>(squared_.at(x, y))); }

    const Grid<std::int64_t>& squared_grid() const { return squared_; }

    bool operator==(const DistanceField& other) const { return squared_ == other.squared_; }

private:
    Grid<std::int64_t> squared_;
};

// Exact Euclidean distance transform (two-pass lower-envelope algorithm).
// Throws DegenerateInputError if the reference has no foreground.
DistanceField distance_transform(const BinaryImage& reference);

} // namespace binaq
