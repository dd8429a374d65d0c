#include <doctest.h>

#include <random>
#include <vector>

#include "binaq/errors.hpp"
#include "binaq/patchwork.hpp"
#include "synthetic.hpp"

using namespace binaq;

namespace {

Grid<double> to_soft(const BinaryImage& b) {
    Grid<double> g(b.width(), b.height());
    for (int y = 0; y < b.height(); ++y) {
        for (int x = 0; x < b.width(); ++x) {
            g.at(x, y) = b.foreground(x, y) ? 1.0 : 0.0;
        }
    }
    return g;
}

// Library-level round trip: the binary image as a hard 0/1 map.
BinaryImage round_trip(const BinaryImage& source, int patch, int stride) {
    RasterImage raster(source.width(), source.height());
    for (int y = 0; y < source.height(); ++y) {
        for (int x = 0; x < source.width(); ++x) {
            raster.set(x, y, source.foreground(x, y) ? 1 : 0);
        }
    }
    const PatchGrid grid = make_patch_grid(source.width(), source.height(), patch, stride);
    const auto patches = split(raster, grid);
    std::vector<Grid<double>> soft;
    soft.reserve(patches.size());
    for (const auto& p : patches) {
        Grid<double> g(p.width(), p.height());
        for (int y = 0; y < p.height(); ++y) {
            for (int x = 0; x < p.width(); ++x) {
                g.at(x, y) = p.at(x, y);
            }
        }
        soft.push_back(std::move(g));
    }
    return stitch(grid, soft);
}

RasterImage rot90x(const RasterImage& p, int times) {
    RasterImage out = p;
    for (int i = 0; i < times; ++i) out = augment(out, AugmentOp::Rot90);
    return out;
}

} // namespace

TEST_SUITE("patchwork") {

TEST_CASE("grid layout") {
    const PatchGrid exact = make_patch_grid(256, 256, 256, 256);
    CHECK(exact.origins == std::vector<std::pair<int, int>>{{0, 0}});

    const PatchGrid flush = make_patch_grid(300, 300, 256, 128);
    CHECK(flush.origins ==
          std::vector<std::pair<int, int>>{{0, 0}, {44, 0}, {0, 44}, {44, 44}});

    const PatchGrid padded = make_patch_grid(100, 100, 128, 128);
    CHECK(padded.origins == std::vector<std::pair<int, int>>{{0, 0}});
    CHECK(padded.padded_width() == 128);

    const PatchGrid strided = make_patch_grid(300, 128, 128, 64);
    std::vector<int> xs;
    for (auto [x, y] : strided.origins) xs.push_back(x);
    CHECK(xs == std::vector<int>{0, 64, 128, 172});
}

TEST_CASE("grid configuration errors") {
    CHECK_THROWS_AS(make_patch_grid(100, 100, 0, 1), ConfigError);
    CHECK_THROWS_AS(make_patch_grid(100, 100, 64, 0), ConfigError);
    CHECK_THROWS_AS(make_patch_grid(100, 100, 64, 65), ConfigError);
}

TEST_CASE("undersized sources are reflect-padded") {
    std::mt19937 rng(107);
    const RasterImage img = synth::random_raster(100, 100, rng);
    const PatchGrid grid = make_patch_grid(100, 100, 128, 128);
    const auto patches = split(img, grid);
    REQUIRE(patches.size() == 1);
    const RasterImage& p = patches[0];
    CHECK(p.width() == 128);
    // In-range pixels are verbatim; past the edge mirrors back inward.
    CHECK(p.at(99, 0) == img.at(99, 0));
    CHECK(p.at(100, 0) == img.at(99, 0));
    CHECK(p.at(101, 7) == img.at(98, 7));
    CHECK(p.at(127, 0) == img.at(72, 0));
    CHECK(p.at(0, 127) == img.at(0, 72));
}

TEST_CASE("reflection handles tiny sources") {
    CHECK(reflect_index(0, 1) == 0);
    CHECK(reflect_index(5, 1) == 0);
    CHECK(reflect_index(2, 2) == 1);
    CHECK(reflect_index(3, 2) == 0);
    const RasterImage dot(1, 1, 9);
    const auto patches = split(dot, make_patch_grid(1, 1, 4, 4));
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            CHECK(patches[0].at(x, y) == 9);
        }
    }
}

TEST_CASE("exact-fit patches copy the source") {
    std::mt19937 rng(109);
    const RasterImage img = synth::random_raster(64, 48, rng);
    const PatchGrid grid = make_patch_grid(64, 48, 16, 16);
    const auto patches = split(img, grid);
    for (size_t i = 0; i < patches.size(); ++i) {
        const auto [ox, oy] = grid.origins[i];
        for (int y = 0; y < 16; ++y) {
            for (int x = 0; x < 16; ++x) {
                CHECK(patches[i].at(x, y) == img.at(ox + x, oy + y));
            }
        }
    }
}

TEST_CASE("stitch basics") {
    // Single exact-fit hard patch comes back verbatim.
    std::mt19937 rng(113);
    const BinaryImage b = synth::random_binary(32, 32, 0.5, rng);
    const PatchGrid grid = make_patch_grid(32, 32, 32, 32);
    CHECK(stitch(grid, {to_soft(b)}) == b);

    // Overlapping patches that agree produce their common labels.
    const PatchGrid overlap = make_patch_grid(3, 2, 2, 1);
    const auto grids = overlap.origins.size();
    std::vector<Grid<double>> agree(grids, Grid<double>(2, 2, 1.0));
    CHECK(stitch(overlap, agree).foreground_count() == 6);

    // A 1.0 / 0.0 disagreement averages to 0.5, which is foreground.
    const PatchGrid two = make_patch_grid(3, 2, 2, 1);
    REQUIRE(two.origins.size() == 2);
    std::vector<Grid<double>> half = {Grid<double>(2, 2, 1.0), Grid<double>(2, 2, 0.0)};
    const BinaryImage tie = stitch(two, half);
    CHECK(tie.foreground(0, 0));  // covered only by patch A (1.0)
    CHECK(tie.foreground(1, 0));  // overlap: average 0.5 resolves to ink
    CHECK(!tie.foreground(2, 0)); // covered only by patch B (0.0)
}

TEST_CASE("stitch shape errors") {
    const PatchGrid grid = make_patch_grid(32, 32, 16, 16);
    CHECK_THROWS_AS(stitch(grid, {}), ShapeError);
    std::vector<Grid<double>> wrong(grid.origins.size(), Grid<double>(8, 8, 0.0));
    CHECK_THROWS_AS(stitch(grid, wrong), ShapeError);
}

TEST_CASE("every source pixel is covered") {
    std::mt19937 rng(127);
    std::uniform_int_distribution<int> dim(1, 140);
    for (int i = 0; i < 30; ++i) {
        const int w = dim(rng);
        const int h = dim(rng);
        std::uniform_int_distribution<int> ps(1, 64);
        const int patch = ps(rng);
        std::uniform_int_distribution<int> st(1, patch);
        const PatchGrid grid = make_patch_grid(w, h, patch, st(rng));
        std::vector<Grid<double>> ones(grid.origins.size(),
                                       Grid<double>(grid.patch_size, grid.patch_size, 1.0));
        // stitch divides by the cover count, so this throws or misfills if
        // any pixel were uncovered.
        CHECK(stitch(grid, ones).foreground_count() == static_cast<size_t>(w) * h);
    }
}

TEST_CASE("split plus stitch is the identity on binary sources") {
    std::mt19937 rng(131);
    const std::vector<std::pair<int, int>> configs = {{128, 128}, {128, 64}, {256, 128}};
    const std::vector<std::pair<int, int>> dims = {
        {128, 128}, {300, 300}, {200, 131}, {97, 263}, {64, 64}};
    for (const auto& [w, h] : dims) {
        const BinaryImage b = synth::random_binary(w, h, 0.35, rng);
        for (const auto& [patch, stride] : configs) {
            CHECK(round_trip(b, patch, stride) == b);
        }
    }
}

TEST_CASE("augmentations") {
    std::mt19937 rng(137);
    const RasterImage p = synth::random_raster(16, 16, rng);

    CHECK(augment(augment(p, AugmentOp::HFlip), AugmentOp::HFlip) == p);
    CHECK(augment(augment(p, AugmentOp::VFlip), AugmentOp::VFlip) == p);
    CHECK(rot90x(p, 4) == p);
    CHECK(augment(augment(p, AugmentOp::Rot180), AugmentOp::Rot180) == p);
    CHECK(augment(p, AugmentOp::Rot180) == rot90x(p, 2));
    CHECK(augment(p, AugmentOp::Rot270) == rot90x(p, 3));

    RasterImage quad(2, 2);
    quad.set(0, 0, 'a');
    quad.set(1, 0, 'b');
    quad.set(0, 1, 'c');
    quad.set(1, 1, 'd');
    const RasterImage turned = augment(quad, AugmentOp::Rot90);
    CHECK(turned.at(0, 0) == 'c');
    CHECK(turned.at(1, 0) == 'a');
    CHECK(turned.at(0, 1) == 'd');
    CHECK(turned.at(1, 1) == 'b');

    const RasterImage wide(5, 3, 1);
    CHECK_THROWS_AS(augment(wide, AugmentOp::Rot90), ShapeError);
    CHECK_THROWS_AS(augment(wide, AugmentOp::Rot180), ShapeError);
    CHECK(augment(wide, AugmentOp::HFlip).width() == 5);
}

TEST_CASE("the six ops close inside the symmetry group of the square") {
    std::mt19937 rng(139);
    const RasterImage p = synth::random_raster(8, 8, rng);

    auto transpose = [](const RasterImage& img) {
        RasterImage out(img.height(), img.width());
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                out.set(y, x, img.at(x, y));
            }
        }
        return out;
    };

    // All eight square symmetries.
    std::vector<RasterImage> group = {
        p,
        augment(p, AugmentOp::Rot90),
        augment(p, AugmentOp::Rot180),
        augment(p, AugmentOp::Rot270),
        augment(p, AugmentOp::HFlip),
        augment(p, AugmentOp::VFlip),
        transpose(p),
        augment(transpose(p), AugmentOp::Rot180),
    };

    const std::vector<AugmentOp> ops = {AugmentOp::HFlip, AugmentOp::VFlip, AugmentOp::Rot90,
                                        AugmentOp::Rot180, AugmentOp::Rot270};
    for (AugmentOp first : ops) {
        for (AugmentOp second : ops) {
            const RasterImage composed = augment(augment(p, first), second);
            bool found = false;
            for (const auto& g : group) {
                if (composed == g) found = true;
            }
            CHECK(found);
        }
    }
}

} // TEST_SUITE
