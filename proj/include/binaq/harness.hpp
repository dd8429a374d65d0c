#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "binaq/binarize.hpp"
#include "binaq/dataset.hpp"
#include "binaq/image.hpp"
#include "binaq/metrics.hpp"

namespace binaq {

// The four reported metrics, in table column order.
enum class MetricKind { Psnr = 0, Fm = 1, Pfm = 2, Drd = 3 };

inline constexpr std::array<MetricKind, 4> kAllMetrics = {
    MetricKind::Psnr, MetricKind::Fm, MetricKind::Pfm, MetricKind::Drd};

// Rank direction: higher is better for PSNR/FM/pFM, lower for DRD.
constexpr bool higher_is_better(MetricKind m) { return m != MetricKind::Drd; }

const char* metric_key(MetricKind m);     // "psnr", "fm", "pfm", "drd"
const char* metric_display(MetricKind m); // "PSNR", "FM", "pFM", "DRD"

// A scoreable method: either a built-in binarizer run on the input images,
// or a directory of exported prediction images matched by entry id.
struct MethodSource {
    enum class Kind { Builtin, Predictions };

    Kind kind = Kind::Predictions;
    std::string name;

    // Builtin configuration.
    std::string algorithm; // "otsu" | "sauvola" | "mws"
    SauvolaParams sauvola;
    std::vector<SauvolaParams> windows; // mws bank
    std::vector<double> weights;        // mws fusion weights
    std::optional<int> patch_size;      // run patch-wise when set
    std::optional<int> patch_stride;

    // Predictions configuration.
    std::filesystem::path directory;
    Polarity prediction_polarity = Polarity::DarkIsForeground;

    static MethodSource builtin(const std::string& algorithm);
    static MethodSource predictions(const std::filesystem::path& directory,
                                    const std::string& name = "");

    std::string describe() const;
};

// Runs one builtin binarizer on one image (patch-wise when configured).
BinaryImage run_builtin(const MethodSource& method, const RasterImage& image);

// Mean of one metric over a dataset, with exclusion bookkeeping: undefined
// per-image values (and infinite PSNR) never enter the mean.
struct MetricMean {
    std::optional<double> value;
    int included = 0;
    int excluded = 0;
    std::string excluded_reason; // first exclusion reason seen
};

struct DatasetEval {
    std::map<std::string, MetricScores> per_image; // id -> scores
    std::array<MetricMean, 4> means;               // indexed by MetricKind
};

// Scores a method over a dataset. Builtin methods binarize each entry's
// image; prediction directories are decoded directly. Warnings about
// excluded cells are appended to `warnings` when non-null.
// Throws DataError naming the id when a prediction is missing.
DatasetEval evaluate(const MethodSource& method, const std::vector<DatasetEntry>& entries,
                     std::vector<std::string>* warnings = nullptr);

struct ThroughputResult {
    double images_per_sec;
    int images;
    double elapsed_sec;
};

// Wall clock over one single-threaded binarization pass, images preloaded.
// Throws UnsupportedOperationError for prediction-directory methods.
ThroughputResult measure_throughput(const MethodSource& method,
                                    const std::vector<DatasetEntry>& entries);

// TP black, TN white, FP cyan, FN orange.
RgbImage overlay_errors(const BinaryImage& pred, const BinaryImage& gt);

// Worker pool size: min(items, hardware threads, BINAQ_THREADS), at least 1.
int worker_count(int items);

} // namespace binaq
