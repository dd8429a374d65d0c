#pragma once

#include <cassert>
#include <vector>

namespace binaq {

// Row-major rectangular grid of values. Shared storage shape for threshold
// maps, distance fields and weight maps.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height),
          cells_(static_cast<size_t>(width) * static_cast<size_t>(height), fill) {
        assert(width >= 0 && height >= 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }

    T& at(int x, int y) {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_);
        return cells_[static_cast<size_t>(y) * width_ + x];
    }
    const T& at(int x, int y) const {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_);
        return cells_[static_cast<size_t>(y) * width_ + x];
    }

    T* data() { return cells_.data(); }
    const T* data() const { return cells_.data(); }

    auto begin() { return cells_.begin(); }
    auto end() { return cells_.end(); }
    auto begin() const { return cells_.begin(); }
    auto end() const { return cells_.end(); }

    template <typename U>
    bool same_shape(const Grid<U>& other) const {
        return width_ == other.width() && height_ == other.height();
    }

    bool operator==(const Grid& other) const {
        return width_ == other.width_ && height_ == other.height_ && cells_ == other.cells_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> cells_;
};

} // namespace binaq
