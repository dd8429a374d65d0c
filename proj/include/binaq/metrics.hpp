#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "binaq/distance.hpp"
#include "binaq/grid.hpp"
#include "binaq/image.hpp"

namespace binaq {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionCounts&) const = default;
};

// Pixel-wise confusion of a prediction against ground truth.
// Throws ShapeError on dimension mismatch.
ConfusionCounts confusion_counts(const BinaryImage& pred, const BinaryImage& gt);

struct FMeasureResult {
    double fm;
    double recall;
    double precision;
};

// FM = 2 R P / (R + P); FM = 0 when R + P = 0.
// Throws DegenerateInputError when the ground truth or the prediction has
// no foreground at all (tp+fn == 0 or tp+fp == 0).
FMeasureResult f_measure(const ConfusionCounts& c);

// PSNR = 10 log10(C^2 / MSE) with C = 1 on {0,1} images.
// Identical images return +infinity, never a fabricated finite value.
double psnr(const BinaryImage& pred, const BinaryImage& gt);

// Number of non-uniform 8x8 blocks, top-left anchored; partial edge blocks
// are checked over their actual pixels.
int nubn(const BinaryImage& gt);

// 5x5 reciprocal-distance weights, center 0, normalized to sum 1.
class DrdWeightMatrix {
public:
    DrdWeightMatrix();

    // Normalized entry.
    double at(int i, int j) const { return normalized_[i][j]; }
    // Unnormalized entry (1/distance to center, 0 at the center).
    double raw(int i, int j) const { return raw_[i][j]; }
    double raw_sum() const { return raw_sum_; }

private:
    std::array<std::array<double, 5>, 5> raw_;
    std::array<std::array<double, 5>, 5> normalized_;
    double raw_sum_;
};

DrdWeightMatrix drd_weight_matrix();

// Distance reciprocal distortion: sum of per-flipped-pixel distortions over
// the number of non-uniform blocks. Out-of-bounds neighborhood positions
// contribute nothing.
// Throws UndefinedMetricError when nubn(gt) == 0, ShapeError on mismatch.
double drd(const BinaryImage& pred, const BinaryImage& gt);

// Estimated characteristic stroke thickness of the ground truth:
// max(1, round(2 * mean interior distance over ridge pixels)), where ridge
// pixels are foreground pixels whose interior distance is >= all 8-neighbors.
// Throws DegenerateInputError when gt has no foreground or no background.
int stroke_width(const BinaryImage& gt);

struct PfmWeightMaps {
    Grid<double> recall_weights;    // 1 on foreground, linear decay to 0 at SW
    Grid<double> precision_weights; // 1 outside, ramps to 2 at interior depth SW/2
    int stroke_width = 1;
};

PfmWeightMaps pfm_weight_maps(const BinaryImage& gt);

struct PseudoFResult {
    double pfm;
    double p_recall;
    double p_precision;
};

// Distance-weighted recall/precision per the weight maps above.
// Throws DegenerateInputError when either image has no foreground or the
// ground truth has no background.
PseudoFResult pseudo_f_measure(const BinaryImage& pred, const BinaryImage& gt);

// One image pair's bundle of all four metrics. Degenerate sub-metrics are
// carried as unset optionals with a machine-readable reason, never as zeros.
struct MetricScores {
    std::optional<double> fm, recall, precision;
    std::optional<double> pfm, p_recall, p_precision;
    std::optional<double> psnr; // +infinity sentinel for identical pairs
    std::optional<double> drd;
    std::string fm_reason;   // set iff fm is unset
    std::string pfm_reason;  // set iff pfm is unset
    std::string psnr_reason; // set iff psnr is unset (currently never)
    std::string drd_reason;  // set iff drd is unset
    ConfusionCounts counts;
};

// Throws ShapeError on dimension mismatch; all per-metric degeneracies are
// recorded as markers instead of propagating.
MetricScores score_pair(const BinaryImage& pred, const BinaryImage& gt);

} // namespace binaq
