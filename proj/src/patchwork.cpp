#include "binaq/patchwork.hpp"

#include <string>

#include "binaq/errors.hpp"

namespace binaq {

namespace {

// Origins at stride multiples, plus a flush-to-edge final origin when the
// dimension is not an exact fit. A dimension smaller than the patch yields a
// single origin at 0 (the patch will be reflect-padded).
std::vector<int> axis_origins(int dim, int patch, int stride) {
    if (dim <= patch) {
        return {0};
    }
    std::vector<int> xs;
    for (int x = 0; x + patch <= dim; x += stride) {
        xs.push_back(x);
    }
    if (xs.back() != dim - patch) {
        xs.push_back(dim - patch);
    }
    return xs;
}

} // namespace

PatchGrid make_patch_grid(int source_width, int source_height, int patch_size, int stride) {
    if (patch_size < 1) {
        throw ConfigError("patch size must be >= 1, got " + std::to_string(patch_size));
    }
    if (stride < 1 || stride > patch_size) {
        throw ConfigError("stride must be in [1, patch_size], got " + std::to_string(stride));
    }
    if (source_width < 1 || source_height < 1) {
        throw ShapeError("patch grid needs a non-empty source image");
    }
    PatchGrid grid;
    grid.patch_size = patch_size;
    grid.stride = stride;
    grid.source_width = source_width;
    grid.source_height = source_height;
    const std::vector<int> xs = axis_origins(source_width, patch_size, stride);
    const std::vector<int> ys = axis_origins(source_height, patch_size, stride);
    for (int y : ys) {
        for (int x : xs) {
            grid.origins.emplace_back(x, y);
        }
    }
    return grid;
}

int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    int p = i % period;
    if (p < 0) p += period;
    return p < n ? p : period - 1 - p;
}

std::vector<RasterImage> split(const RasterImage& image, const PatchGrid& grid) {
    std::vector<RasterImage> patches;
    patches.reserve(grid.origins.size());
    for (const auto& [ox, oy] : grid.origins) {
        RasterImage patch(grid.patch_size, grid.patch_size);
        for (int y = 0; y < grid.patch_size; ++y) {
            const int sy = reflect_index(oy + y, image.height());
            for (int x = 0; x < grid.patch_size; ++x) {
                const int sx = reflect_index(ox + x, image.width());
                patch.set(x, y, image.at(sx, sy));
            }
        }
        patches.push_back(std::move(patch));
    }
    return patches;
}

BinaryImage stitch(const PatchGrid& grid, const std::vector<Grid<double>>& patch_outputs) {
    if (patch_outputs.size() != grid.origins.size()) {
        throw ShapeError("stitch: grid has " + std::to_string(grid.origins.size()) +
                         " patches but " + std::to_string(patch_outputs.size()) + " outputs given");
    }
    for (const auto& p : patch_outputs) {
        if (p.width() != grid.patch_size || p.height() != grid.patch_size) {
            throw ShapeError("stitch: patch output is " + std::to_string(p.width()) + "x" +
                             std::to_string(p.height()) + ", expected " +
                             std::to_string(grid.patch_size) + " square");
        }
    }

    Grid<double> sums(grid.source_width, grid.source_height, 0.0);
    Grid<int> counts(grid.source_width, grid.source_height, 0);
    for (size_t i = 0; i < patch_outputs.size(); ++i) {
        const auto& [ox, oy] = grid.origins[i];
        for (int y = 0; y < grid.patch_size; ++y) {
            const int sy = oy + y;
            if (sy >= grid.source_height) break; // padding rows
            for (int x = 0; x < grid.patch_size; ++x) {
                const int sx = ox + x;
                if (sx >= grid.source_width) break; // padding columns
                sums.at(sx, sy) += patch_outputs[i].at(x, y);
                counts.at(sx, sy) += 1;
            }
        }
    }

    BinaryImage out(grid.source_width, grid.source_height);
    for (int y = 0; y < grid.source_height; ++y) {
        for (int x = 0; x < grid.source_width; ++x) {
            const double avg = sums.at(x, y) / counts.at(x, y);
            out.set(x, y, avg >= 0.5);
        }
    }
    return out;
}

RasterImage augment(const RasterImage& patch, AugmentOp op) {
    const int w = patch.width();
    const int h = patch.height();
    const bool rotation = op == AugmentOp::Rot90 || op == AugmentOp::Rot180 || op == AugmentOp::Rot270;
    if (rotation && w != h) {
        throw ShapeError("augment: rotations require a square patch, got " +
                         std::to_string(w) + "x" + std::to_string(h));
    }
    RasterImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            switch (op) {
                case AugmentOp::HFlip: out.set(x, y, patch.at(w - 1 - x, y)); break;
                case AugmentOp::VFlip: out.set(x, y, patch.at(x, h - 1 - y)); break;
                case AugmentOp::Rot90: out.set(x, y, patch.at(y, h - 1 - x)); break;
                case AugmentOp::Rot180: out.set(x, y, patch.at(w - 1 - x, h - 1 - y)); break;
                case AugmentOp::Rot270: out.set(x, y, patch.at(w - 1 - y, x)); break;
            }
        }
    }
    return out;
}

} // namespace binaq
