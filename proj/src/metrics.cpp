#include "binaq/metrics.hpp"

#include <cmath>
#include <limits>

#include "binaq/errors.hpp"

namespace binaq {

namespace {

void require_same_shape(const BinaryImage& a, const BinaryImage& b, const char* op) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw ShapeError(std::string(op) + ": dimension mismatch (" +
                         std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                         std::to_string(b.width()) + "x" + std::to_string(b.height()) + ")");
    }
}

} // namespace

ConfusionCounts confusion_counts(const BinaryImage& pred, const BinaryImage& gt) {
    require_same_shape(pred, gt, "confusion_counts");
    ConfusionCounts c;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            const bool p = pred.foreground(x, y);
            const bool g = gt.foreground(x, y);
            if (p && g)
                ++c.tp;
            else if (p && !g)
                ++c.fp;
            else if (!p && g)
                ++c.fn;
            else
                ++c.tn;
        }
    }
    return c;
}

FMeasureResult f_measure(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) {
        throw DegenerateInputError("f_measure: ground truth has no foreground");
    }
    if (c.tp + c.fp == 0) {
        throw DegenerateInputError("f_measure: prediction has no foreground");
    }
    const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double denom = recall + precision;
    const double fm = denom > 0.0 ? 2.0 * recall * precision / denom : 0.0;
    return {fm, recall, precision};
}

double psnr(const BinaryImage& pred, const BinaryImage& gt) {
    require_same_shape(pred, gt, "psnr");
    std::uint64_t mismatched = 0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            if (pred.foreground(x, y) != gt.foreground(x, y)) ++mismatched;
        }
    }
    if (mismatched == 0) {
        return std::numeric_limits<double>::infinity();
    }
    // On {0,1} images every mismatch contributes 1 to the squared error and
    // the contrast constant C is 1.
    const double mse = static_cast<double>(mismatched) / static_cast<double>(gt.pixel_count());
    return 10.0 * std::log10(1.0 / mse);
}

int nubn(const BinaryImage& gt) {
    int count = 0;
    for (int by = 0; by < gt.height(); by += 8) {
        for (int bx = 0; bx < gt.width(); bx += 8) {
            const int x1 = std::min(bx + 8, gt.width());
            const int y1 = std::min(by + 8, gt.height());
            bool any_fg = false, any_bg = false;
            for (int y = by; y < y1 && !(any_fg && any_bg); ++y) {
                for (int x = bx; x < x1; ++x) {
                    (gt.foreground(x, y) ? any_fg : any_bg) = true;
                }
            }
            if (any_fg && any_bg) ++count;
        }
    }
    return count;
}

DrdWeightMatrix::DrdWeightMatrix() {
    raw_sum_ = 0.0;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            if (i == 2 && j == 2) {
                raw_[i][j] = 0.0;
            } else {
                const double di = i - 2;
                const double dj = j - 2;
                raw_[i][j] = 1.0 / std::sqrt(di * di + dj * dj);
            }
            raw_sum_ += raw_[i][j];
        }
    }
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            normalized_[i][j] = raw_[i][j] / raw_sum_;
        }
    }
}

DrdWeightMatrix drd_weight_matrix() { return DrdWeightMatrix{}; }

double drd(const BinaryImage& pred, const BinaryImage& gt) {
    require_same_shape(pred, gt, "drd");
    const int blocks = nubn(gt);
    if (blocks == 0) {
        throw UndefinedMetricError("drd: ground truth is uniform (NUBN = 0)");
    }
    static const DrdWeightMatrix mat;

    double total = 0.0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            const bool p = pred.foreground(x, y);
            if (p == gt.foreground(x, y)) continue;
            const double pv = p ? 1.0 : 0.0;
            // Accumulate raw weights in matrix order and normalize once, so a
            // flip whose whole neighborhood disagrees contributes exactly 1.
            double acc = 0.0;
            for (int i = 0; i < 5; ++i) {
                const int gy = y + i - 2;
                if (gy < 0 || gy >= gt.height()) continue;
                for (int j = 0; j < 5; ++j) {
                    const int gx = x + j - 2;
                    if (gx < 0 || gx >= gt.width()) continue;
                    const double gv = gt.foreground(gx, gy) ? 1.0 : 0.0;
                    acc += std::abs(gv - pv) * mat.raw(i, j);
                }
            }
            total += acc / mat.raw_sum();
        }
    }
    return total / blocks;
}

int stroke_width(const BinaryImage& gt) {
    if (gt.foreground_count() == 0) {
        throw DegenerateInputError("stroke_width: no foreground pixels");
    }
    if (gt.foreground_count() == gt.pixel_count()) {
        throw DegenerateInputError("stroke_width: no background pixels");
    }
    const DistanceField interior = distance_transform(complement(gt));

    // Ridge pixels: foreground local maxima of the interior distance.
    double ridge_sum = 0.0;
    std::uint64_t ridge_count = 0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            if (!gt.foreground(x, y)) continue;
            const std::int64_t here = interior.squared(x, y);
            bool ridge = true;
            for (int dy = -1; dy <= 1 && ridge; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || nx >= gt.width() || ny < 0 || ny >= gt.height()) continue;
                    if (interior.squared(nx, ny) > here) {
                        ridge = false;
                        break;
                    }
                }
            }
            if (ridge) {
                ridge_sum += std::sqrt(static_cast<double>(here));
                ++ridge_count;
            }
        }
    }
    // The global interior-distance maximum is always a ridge pixel.
    const double mean = ridge_sum / static_cast<double>(ridge_count);
    const long rounded = std::lround(2.0 * mean);
    return rounded < 1 ? 1 : static_cast<int>(rounded);
}

PfmWeightMaps pfm_weight_maps(const BinaryImage& gt) {
    if (gt.foreground_count() == 0) {
        throw DegenerateInputError("pfm_weight_maps: no foreground pixels");
    }
    if (gt.foreground_count() == gt.pixel_count()) {
        throw DegenerateInputError("pfm_weight_maps: no background pixels");
    }
    const DistanceField outer = distance_transform(gt);
    const DistanceField interior = distance_transform(complement(gt));
    const int sw = stroke_width(gt);
    const double swd = static_cast<double>(sw);

    PfmWeightMaps maps;
    maps.stroke_width = sw;
    maps.recall_weights = Grid<double>(gt.width(), gt.height());
    maps.precision_weights = Grid<double>(gt.width(), gt.height());
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            if (gt.foreground(x, y)) {
                maps.recall_weights.at(x, y) = 1.0;
                maps.precision_weights.at(x, y) =
                    1.0 + std::min(1.0, 2.0 * interior.at(x, y) / swd);
            } else {
                maps.recall_weights.at(x, y) = std::max(0.0, 1.0 - outer.at(x, y) / swd);
                maps.precision_weights.at(x, y) = 1.0;
            }
        }
    }
    return maps;
}

PseudoFResult pseudo_f_measure(const BinaryImage& pred, const BinaryImage& gt) {
    require_same_shape(pred, gt, "pseudo_f_measure");
    if (pred.foreground_count() == 0) {
        throw DegenerateInputError("pseudo_f_measure: prediction has no foreground");
    }
    const PfmWeightMaps maps = pfm_weight_maps(gt); // checks gt degeneracies

    double recall_num = 0.0, recall_den = 0.0;
    double prec_num = 0.0, prec_den = 0.0;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            const bool p = pred.foreground(x, y);
            const bool g = gt.foreground(x, y);
            if (p) {
                recall_num += maps.recall_weights.at(x, y);
                prec_den += maps.precision_weights.at(x, y);
                if (g) prec_num += maps.precision_weights.at(x, y);
            }
            if (g) recall_den += maps.recall_weights.at(x, y);
        }
    }
    const double p_recall = std::min(1.0, recall_num / recall_den);
    const double p_precision = prec_num / prec_den;
    const double denom = p_recall + p_precision;
    const double pfm = denom > 0.0 ? 2.0 * p_recall * p_precision / denom : 0.0;
    return {pfm, p_recall, p_precision};
}

MetricScores score_pair(const BinaryImage& pred, const BinaryImage& gt) {
    require_same_shape(pred, gt, "score_pair");
    MetricScores s;
    s.counts = confusion_counts(pred, gt);

    if (s.counts.tp + s.counts.fn == 0) {
        s.fm_reason = "no_gt_foreground";
    } else if (s.counts.tp + s.counts.fp == 0) {
        s.fm_reason = "no_pred_foreground";
    } else {
        const FMeasureResult f = f_measure(s.counts);
        s.fm = f.fm;
        s.recall = f.recall;
        s.precision = f.precision;
    }

    if (gt.foreground_count() == 0) {
        s.pfm_reason = "no_gt_foreground";
    } else if (gt.foreground_count() == gt.pixel_count()) {
        s.pfm_reason = "no_gt_background";
    } else if (pred.foreground_count() == 0) {
        s.pfm_reason = "no_pred_foreground";
    } else {
        const PseudoFResult p = pseudo_f_measure(pred, gt);
        s.pfm = p.pfm;
        s.p_recall = p.p_recall;
        s.p_precision = p.p_precision;
    }

    s.psnr = psnr(pred, gt); // +infinity for identical pairs

    if (nubn(gt) == 0) {
        s.drd_reason = "uniform_gt";
    } else {
        s.drd = drd(pred, gt);
    }
    return s;
}

} // namespace binaq
