#include "binaq/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "binaq/errors.hpp"
#include "binaq/image_io.hpp"
#include "binaq/patchwork.hpp"

namespace binaq {

const char* metric_key(MetricKind m) {
    switch (m) {
        case MetricKind::Psnr: return "psnr";
        case MetricKind::Fm: return "fm";
        case MetricKind::Pfm: return "pfm";
        case MetricKind::Drd: return "drd";
    }
    return "?";
}

const char* metric_display(MetricKind m) {
    switch (m) {
        case MetricKind::Psnr: return "PSNR";
        case MetricKind::Fm: return "FM";
        case MetricKind::Pfm: return "pFM";
        case MetricKind::Drd: return "DRD";
    }
    return "?";
}

MethodSource MethodSource::builtin(const std::string& algorithm) {
    MethodSource m;
    m.kind = Kind::Builtin;
    m.algorithm = algorithm;
    m.name = algorithm;
    if (algorithm == "mws") {
        for (int w : {7, 15, 31, 63}) {
            SauvolaParams p;
            p.window = w;
            m.windows.push_back(p);
        }
        m.weights.assign(4, 0.25);
    }
    return m;
}

MethodSource MethodSource::predictions(const std::filesystem::path& directory,
                                       const std::string& name) {
    MethodSource m;
    m.kind = Kind::Predictions;
    m.directory = directory;
    m.name = name.empty() ? directory.filename().string() : name;
    if (m.name.empty()) m.name = "predictions";
    return m;
}

std::string MethodSource::describe() const {
    std::ostringstream out;
    if (kind == Kind::Predictions) {
        out << "predictions:" << directory.string();
        if (prediction_polarity == Polarity::LightIsForeground) out << " (light foreground)";
        return out.str();
    }
    if (algorithm == "otsu") {
        out << "otsu";
    } else if (algorithm == "sauvola") {
        out << "sauvola(window=" << sauvola.window << ",k=" << sauvola.k << ",r=" << sauvola.r << ")";
    } else {
        out << "mws(windows=[";
        for (size_t i = 0; i < windows.size(); ++i) {
            if (i) out << ",";
            out << windows[i].window;
        }
        out << "],k=" << (windows.empty() ? 0.2 : windows.front().k) << ",weights=[";
        for (size_t i = 0; i < weights.size(); ++i) {
            if (i) out << ",";
            out << weights[i];
        }
        out << "])";
    }
    if (patch_size) {
        out << "+patches(" << *patch_size << "/" << (patch_stride ? *patch_stride : 0) << ")";
    }
    return out.str();
}

namespace {

BinaryImage binarize_whole(const MethodSource& method, const RasterImage& image) {
    if (method.algorithm == "otsu") {
        return binarize_otsu(image);
    }
    if (method.algorithm == "sauvola") {
        return apply_threshold_map(image, sauvola_threshold_map(image, method.sauvola));
    }
    if (method.algorithm == "mws") {
        return apply_threshold_map(image,
                                   multi_window_threshold(image, method.windows, method.weights));
    }
    throw ConfigError("unknown builtin method '" + method.algorithm + "'");
}

Grid<double> to_soft(const BinaryImage& b) {
    Grid<double> g(b.width(), b.height());
    for (int y = 0; y < b.height(); ++y) {
        for (int x = 0; x < b.width(); ++x) {
            g.at(x, y) = b.foreground(x, y) ? 1.0 : 0.0;
        }
    }
    return g;
}

} // namespace

BinaryImage run_builtin(const MethodSource& method, const RasterImage& image) {
    if (method.kind != MethodSource::Kind::Builtin) {
        throw ConfigError("run_builtin called with a prediction-directory method");
    }
    if (!method.patch_size) {
        return binarize_whole(method, image);
    }
    if (!method.patch_stride) {
        throw ConfigError("patch-wise binarization requires an explicit stride");
    }
    const PatchGrid grid =
        make_patch_grid(image.width(), image.height(), *method.patch_size, *method.patch_stride);
    const std::vector<RasterImage> patches = split(image, grid);
    std::vector<Grid<double>> outputs;
    outputs.reserve(patches.size());
    for (const auto& p : patches) {
        outputs.push_back(to_soft(binarize_whole(method, p)));
    }
    return stitch(grid, outputs);
}

int worker_count(int items) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    int cap = hw;
    if (const char* env = std::getenv("BINAQ_THREADS")) {
        try {
            cap = std::max(1, std::stoi(env));
        } catch (...) {
            throw ConfigError(std::string("BINAQ_THREADS is not a number: ") + env);
        }
    }
    return std::max(1, std::min(items, std::min(hw, cap)));
}

namespace {

// Index-sharded parallel loop; results land in caller-owned slots, so the
// output order never depends on scheduling.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = worker_count(n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::map<std::string, std::filesystem::path> index_predictions(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw IoError("prediction directory missing: " + dir.string());
    }
    std::map<std::string, std::filesystem::path> byid;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (ext != ".png" && ext != ".bmp" && ext != ".tif" && ext != ".tiff") continue;
        std::string id = entry.path().stem().string();
        if (id.size() > 3) {
            std::string tail = id.substr(id.size() - 3);
            for (auto& c : tail) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (tail == "_gt") id.erase(id.size() - 3);
        }
        byid.emplace(id, entry.path());
    }
    return byid;
}

} // namespace

DatasetEval evaluate(const MethodSource& method, const std::vector<DatasetEntry>& entries,
                     std::vector<std::string>* warnings) {
    if (entries.empty()) {
        throw DataError("evaluate: dataset is empty");
    }

    std::map<std::string, std::filesystem::path> predictions;
    if (method.kind == MethodSource::Kind::Predictions) {
        predictions = index_predictions(method.directory);
        for (const auto& entry : entries) {
            if (!predictions.count(entry.id)) {
                throw DataError("no prediction for entry '" + entry.id + "' in " +
                                method.directory.string());
            }
        }
    }

    const int n = static_cast<int>(entries.size());
    std::vector<MetricScores> scored(n);
    parallel_for(n, [&](int i) {
        const DatasetEntry& entry = entries[i];
        const BinaryImage gt = decode_binary(load_image(entry.gt_path));
        BinaryImage pred = [&] {
            if (method.kind == MethodSource::Kind::Builtin) {
                return run_builtin(method, load_image(entry.image_path));
            }
            return decode_binary(load_image(predictions.at(entry.id)),
                                 method.prediction_polarity);
        }();
        if (pred.width() != gt.width() || pred.height() != gt.height()) {
            throw ShapeError("entry '" + entry.id + "': prediction is " +
                             std::to_string(pred.width()) + "x" + std::to_string(pred.height()) +
                             " but ground truth is " + std::to_string(gt.width()) + "x" +
                             std::to_string(gt.height()));
        }
        scored[i] = score_pair(pred, gt);
    });

    DatasetEval eval;
    for (int i = 0; i < n; ++i) {
        eval.per_image.emplace(entries[i].id, scored[i]);
    }

    for (MetricKind m : kAllMetrics) {
        MetricMean& mean = eval.means[static_cast<int>(m)];
        double sum = 0.0;
        for (const auto& entry : entries) {
            const MetricScores& s = eval.per_image.at(entry.id);
            std::optional<double> value;
            std::string reason;
            switch (m) {
                case MetricKind::Psnr: value = s.psnr; reason = s.psnr_reason; break;
                case MetricKind::Fm: value = s.fm; reason = s.fm_reason; break;
                case MetricKind::Pfm: value = s.pfm; reason = s.pfm_reason; break;
                case MetricKind::Drd: value = s.drd; reason = s.drd_reason; break;
            }
            if (value && std::isinf(*value)) {
                // Defined sentinel, but it cannot enter an arithmetic mean.
                value.reset();
                reason = "psnr_infinite";
            }
            if (value) {
                sum += *value;
                ++mean.included;
            } else {
                ++mean.excluded;
                if (mean.excluded_reason.empty()) mean.excluded_reason = reason;
                if (warnings) {
                    warnings->push_back("method '" + method.name + "', image '" + entry.id +
                                        "': " + metric_key(m) + " excluded from mean (" + reason +
                                        ")");
                }
            }
        }
        if (mean.included > 0) {
            mean.value = sum / mean.included;
        }
    }
    return eval;
}

ThroughputResult measure_throughput(const MethodSource& method,
                                    const std::vector<DatasetEntry>& entries) {
    if (method.kind != MethodSource::Kind::Builtin) {
        throw UnsupportedOperationError(
            "throughput is only measurable for builtin methods, not prediction directories");
    }
    if (entries.empty()) {
        throw DataError("measure_throughput: dataset is empty");
    }
    std::vector<RasterImage> images;
    images.reserve(entries.size());
    for (const auto& entry : entries) {
        images.push_back(load_image(entry.image_path));
    }
    const auto start = std::chrono::steady_clock::now();
    for (const auto& image : images) {
        volatile size_t sink = run_builtin(method, image).foreground_count();
        (void)sink;
    }
    const auto stop = std::chrono::steady_clock::now();
    double elapsed = std::chrono::duration<double>(stop - start).count();
    if (elapsed < 1e-9) elapsed = 1e-9;
    return {static_cast<double>(images.size()) / elapsed, static_cast<int>(images.size()),
            elapsed};
}

RgbImage overlay_errors(const BinaryImage& pred, const BinaryImage& gt) {
    if (pred.width() != gt.width() || pred.height() != gt.height()) {
        throw ShapeError("overlay_errors: dimension mismatch");
    }
    RgbImage out(gt.width(), gt.height());
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            const bool p = pred.foreground(x, y);
            const bool g = gt.foreground(x, y);
            if (p && g)
                out.set(x, y, 0, 0, 0); // true positive: black
            else if (!p && !g)
                out.set(x, y, 255, 255, 255); // true negative: white
            else if (p && !g)
                out.set(x, y, 0, 255, 255); // false positive: cyan
            else
                out.set(x, y, 255, 165, 0); // false negative: orange
        }
    }
    return out;
}

} // namespace binaq
