#pragma once

#include <utility>
#include <vector>

#include "binaq/grid.hpp"
#include "binaq/image.hpp"

namespace binaq {

// Layout of fixed-size, possibly overlapping patches over a source image.
// Origins step by the stride with a final origin flush to the far edge;
// sources smaller than the patch are reflect-padded, so every patch is
// exactly patch_size x patch_size.
struct PatchGrid {
    int patch_size = 0;
    int stride = 0;
    int source_width = 0;
    int source_height = 0;
    std::vector<std::pair<int, int>> origins; // (x, y), row-major order

    int padded_width() const { return source_width < patch_size ? patch_size : source_width; }
    int padded_height() const { return source_height < patch_size ? patch_size : source_height; }

    bool operator==(const PatchGrid&) const = default;
};

// Throws ConfigError unless patch_size >= 1 and 1 <= stride <= patch_size.
PatchGrid make_patch_grid(int source_width, int source_height, int patch_size, int stride);

// Symmetric (edge-inclusive) reflection of an index into [0, n).
int reflect_index(int i, int n);

// Cuts the grid's patches out of the image, reflect-padding past the edges.
std::vector<RasterImage> split(const RasterImage& image, const PatchGrid& grid);

// Reassembles per-patch soft outputs in [0,1]: overlapping contributions are
// averaged per source pixel, padding regions are discarded, and the final
// label is foreground where the average is >= 0.5.
// Throws ShapeError when patch count or sizes do not match the grid.
BinaryImage stitch(const PatchGrid& grid, const std::vector<Grid<double>>& patch_outputs);

enum class AugmentOp {
    HFlip,
    VFlip,
    Rot90,  // clockwise
    Rot180,
    Rot270, // clockwise
};

// Exact pixel permutation. Rotations require a square patch (ShapeError).
RasterImage augment(const RasterImage& patch, AugmentOp op);

} // namespace binaq
