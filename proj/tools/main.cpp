#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "binaq/binarize.hpp"
#include "binaq/dataset.hpp"
#include "binaq/errors.hpp"
#include "binaq/harness.hpp"
#include "binaq/image_io.hpp"
#include "binaq/patchwork.hpp"
#include "binaq/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<fs::path> list_images(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw binaq::IoError("not a directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (ext == ".png" || ext == ".bmp" || ext == ".tif" || ext == ".tiff") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

binaq::Polarity parse_polarity(const std::string& s) {
    if (s == "dark") return binaq::Polarity::DarkIsForeground;
    if (s == "light") return binaq::Polarity::LightIsForeground;
    throw binaq::ConfigError("polarity must be 'dark' or 'light', got '" + s + "'");
}

std::string hardware_note() {
    return std::to_string(std::thread::hardware_concurrency()) +
           " hardware threads; throughput timed single-threaded, binarization only";
}

struct BinarizeArgs {
    std::string method;
    std::string input, output;
    int window = 25;
    double k = 0.2;
    double r = 128.0;
    std::vector<int> windows = {7, 15, 31, 63};
    std::vector<double> weights;
    int patch_size = 0;
    int stride = 0;
};

binaq::MethodSource build_method(const BinarizeArgs& a) {
    binaq::MethodSource method = binaq::MethodSource::builtin(a.method);
    method.sauvola.window = a.window;
    method.sauvola.k = a.k;
    method.sauvola.r = a.r;
    if (a.method == "mws") {
        method.windows.clear();
        for (int w : a.windows) {
            binaq::SauvolaParams p;
            p.window = w;
            p.k = a.k;
            p.r = a.r;
            method.windows.push_back(p);
        }
        if (a.weights.empty()) {
            method.weights.assign(method.windows.size(),
                                  1.0 / static_cast<double>(method.windows.size()));
        } else {
            method.weights = a.weights;
        }
    }
    if (a.patch_size > 0) {
        if (a.stride <= 0) {
            throw binaq::ConfigError("--patch-size requires an explicit --stride");
        }
        method.patch_size = a.patch_size;
        method.patch_stride = a.stride;
    }
    return method;
}

void run_binarize(const BinarizeArgs& a) {
    const binaq::MethodSource method = build_method(a);
    const auto files = list_images(a.input);
    if (files.empty()) {
        throw binaq::DataError("no images found in " + a.input);
    }
    fs::create_directories(a.output);
    const auto start = std::chrono::steady_clock::now();
    for (const auto& file : files) {
        const binaq::RasterImage image = binaq::load_image(file);
        const binaq::BinaryImage result = binaq::run_builtin(method, image);
        binaq::save_binary(result, fs::path(a.output) / (file.stem().string() + ".png"));
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << files.size() << " images binarized with " << method.describe() << " in "
              << binaq::format2(elapsed) << " s ("
              << binaq::format2(static_cast<double>(files.size()) / std::max(elapsed, 1e-9))
              << " img/sec, I/O included)\n";
}

json grid_to_json(const binaq::PatchGrid& grid) {
    json j;
    j["patch_size"] = grid.patch_size;
    j["stride"] = grid.stride;
    j["source_width"] = grid.source_width;
    j["source_height"] = grid.source_height;
    json origins = json::array();
    for (const auto& [x, y] : grid.origins) {
        origins.push_back(json::array({x, y}));
    }
    j["origins"] = origins;
    return j;
}

binaq::PatchGrid grid_from_json(const json& j) {
    binaq::PatchGrid grid;
    grid.patch_size = j.at("patch_size").get<int>();
    grid.stride = j.at("stride").get<int>();
    grid.source_width = j.at("source_width").get<int>();
    grid.source_height = j.at("source_height").get<int>();
    for (const auto& o : j.at("origins")) {
        grid.origins.emplace_back(o.at(0).get<int>(), o.at(1).get<int>());
    }
    return grid;
}

std::string patch_name(const std::string& id, size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", index);
    return id + "__p" + buf + ".png";
}

void run_patch_split(const std::string& input, const std::string& output, int patch_size,
                     int stride) {
    const auto files = list_images(input);
    if (files.empty()) {
        throw binaq::DataError("no images found in " + input);
    }
    fs::create_directories(output);
    size_t total = 0;
    for (const auto& file : files) {
        const binaq::RasterImage image = binaq::load_image(file);
        const binaq::PatchGrid grid =
            binaq::make_patch_grid(image.width(), image.height(), patch_size, stride);
        const auto patches = binaq::split(image, grid);
        const std::string id = file.stem().string();
        for (size_t i = 0; i < patches.size(); ++i) {
            binaq::save_raster(patches[i], fs::path(output) / patch_name(id, i));
        }
        std::ofstream sidecar(fs::path(output) / (id + ".grid.json"));
        sidecar << grid_to_json(grid).dump(2) << '\n';
        total += patches.size();
    }
    std::cout << total << " patches written from " << files.size() << " images\n";
}

void run_patch_stitch(const std::string& input, const std::string& output) {
    if (!fs::is_directory(input)) {
        throw binaq::IoError("not a directory: " + input);
    }
    std::vector<fs::path> sidecars;
    for (const auto& entry : fs::directory_iterator(input)) {
        if (entry.is_regular_file() && entry.path().filename().string().ends_with(".grid.json")) {
            sidecars.push_back(entry.path());
        }
    }
    std::sort(sidecars.begin(), sidecars.end());
    if (sidecars.empty()) {
        throw binaq::DataError("no .grid.json sidecars found in " + input);
    }
    fs::create_directories(output);
    for (const auto& sidecar : sidecars) {
        std::ifstream in(sidecar);
        json j;
        in >> j;
        const binaq::PatchGrid grid = grid_from_json(j);
        std::string id = sidecar.filename().string();
        id.erase(id.size() - std::string(".grid.json").size());

        std::vector<binaq::Grid<double>> outputs;
        outputs.reserve(grid.origins.size());
        for (size_t i = 0; i < grid.origins.size(); ++i) {
            const fs::path patch_path = fs::path(input) / patch_name(id, i);
            const binaq::RasterImage patch = binaq::load_image(patch_path);
            binaq::Grid<double> soft(patch.width(), patch.height());
            for (int y = 0; y < patch.height(); ++y) {
                for (int x = 0; x < patch.width(); ++x) {
                    soft.at(x, y) = static_cast<double>(patch.at(x, y)) / 255.0;
                }
            }
            outputs.push_back(std::move(soft));
        }
        // Soft maps store foreground as dark; stitch expects 1 = foreground.
        for (auto& soft : outputs) {
            for (auto& v : soft) v = 1.0 - v;
        }
        const binaq::BinaryImage result = binaq::stitch(grid, outputs);
        binaq::save_binary(result, fs::path(output) / (id + ".png"));
    }
    std::cout << sidecars.size() << " images stitched\n";
}

struct EvaluateArgs {
    std::string pred, gt, images, out;
    std::string dataset = "dataset";
    std::string method_name;
    std::string pred_foreground = "dark";
};

int run_evaluate(const EvaluateArgs& a) {
    const fs::path discovery_images = a.images.empty() ? fs::path(a.pred) : fs::path(a.images);
    const auto entries = binaq::discover_dataset(discovery_images, a.gt);

    binaq::MethodSource method =
        binaq::MethodSource::predictions(a.pred, a.method_name.empty() ? fs::path(a.pred).filename().string()
                                                                       : a.method_name);
    method.prediction_polarity = parse_polarity(a.pred_foreground);

    binaq::RunReport report;
    report.provenance.version = binaq::tool_version();
    report.provenance.created = binaq::current_timestamp();
    report.provenance.hardware = hardware_note();
    report.provenance.config_hash = binaq::fnv1a_hex(
        "evaluate;pred=" + a.pred + ";gt=" + a.gt + ";images=" + a.images + ";dataset=" +
        a.dataset + ";method=" + method.name + ";polarity=" + a.pred_foreground);

    binaq::MethodReport method_report;
    method_report.source_kind = "predictions";
    method_report.source_detail = method.describe();
    method_report.datasets.emplace(a.dataset,
                                   binaq::evaluate(method, entries, &report.warnings));
    report.methods.emplace(method.name, method_report);

    bool all_defined = true;
    bool any_defined = false;
    for (const auto& mean : report.methods.at(method.name).datasets.at(a.dataset).means) {
        if (mean.value) {
            any_defined = true;
        } else {
            all_defined = false;
        }
    }
    if (all_defined) {
        binaq::finalize_report(report);
    }

    const std::string body = binaq::emit_report(report, binaq::ReportFormat::Json);
    std::ofstream out(a.out);
    if (!out) {
        throw binaq::IoError("cannot write " + a.out);
    }
    out << body;
    out.close();

    for (const auto& w : report.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    const auto& means = report.methods.at(method.name).datasets.at(a.dataset).means;
    std::cout << entries.size() << " image pairs scored -> " << a.out << '\n';
    for (binaq::MetricKind m : binaq::kAllMetrics) {
        const auto& mean = means[static_cast<int>(m)];
        std::cout << "  " << binaq::metric_display(m) << ": "
                  << (mean.value ? binaq::format2(*mean.value)
                                 : "n/a (" + mean.excluded_reason + ")")
                  << '\n';
    }
    return any_defined ? 0 : 3;
}

binaq::ReportFormat format_from_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".md" || ext == ".markdown") return binaq::ReportFormat::Markdown;
    if (ext == ".csv") return binaq::ReportFormat::Csv;
    if (ext == ".json") return binaq::ReportFormat::Json;
    throw binaq::ConfigError("cannot infer output format from '" + path.string() +
                             "' (expected .md, .csv or .json)");
}

void run_rank(const std::vector<std::string>& report_paths, const std::string& out_path) {
    std::vector<binaq::RunReport> reports;
    reports.reserve(report_paths.size());
    for (const auto& p : report_paths) {
        reports.push_back(binaq::load_report(p));
    }
    binaq::RunReport merged = binaq::merge_reports(reports);
    binaq::finalize_report(merged);
    const std::string body = binaq::emit_report(merged, format_from_extension(out_path));
    std::ofstream out(out_path);
    if (!out) {
        throw binaq::IoError("cannot write " + out_path);
    }
    out << body;
    std::cout << merged.methods.size() << " methods ranked -> " << out_path << '\n';
}

void run_report(const std::string& in_path, const std::string& format) {
    const binaq::RunReport report = binaq::load_report(in_path);
    binaq::ReportFormat f;
    if (format == "json")
        f = binaq::ReportFormat::Json;
    else if (format == "csv")
        f = binaq::ReportFormat::Csv;
    else if (format == "markdown")
        f = binaq::ReportFormat::Markdown;
    else
        throw binaq::ConfigError("format must be json, csv or markdown, got '" + format + "'");
    std::cout << binaq::emit_report(report, f);
}

void run_overlay(const std::string& pred_path, const std::string& gt_path,
                 const std::string& out_path, const std::string& pred_foreground) {
    const binaq::BinaryImage pred =
        binaq::decode_binary(binaq::load_image(pred_path), parse_polarity(pred_foreground));
    const binaq::BinaryImage gt = binaq::decode_binary(binaq::load_image(gt_path));
    binaq::save_rgb(binaq::overlay_errors(pred, gt), out_path);
    std::cout << "overlay written to " << out_path << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"binaq: document image binarization toolkit and evaluation harness"};
    app.set_version_flag("--version", "binaq " + binaq::tool_version());
    app.set_config("--config")->description("key-value file supplying defaults for every flag");
    app.require_subcommand(1);

    int exit_code = 0;

    // binarize
    BinarizeArgs bin;
    auto* cmd_bin = app.add_subcommand("binarize", "run a builtin binarizer over a directory");
    cmd_bin->add_option("--method", bin.method, "otsu | sauvola | mws")
        ->required()
        ->check(CLI::IsMember({"otsu", "sauvola", "mws"}));
    cmd_bin->add_option("--input", bin.input, "input image directory")->required();
    cmd_bin->add_option("--output", bin.output, "output directory")->required();
    cmd_bin->add_option("--window", bin.window, "sauvola window size");
    cmd_bin->add_option("--k", bin.k, "sauvola sensitivity");
    cmd_bin->add_option("--r", bin.r, "sauvola dynamic range");
    cmd_bin->add_option("--windows", bin.windows, "mws window bank")->delimiter(',');
    cmd_bin->add_option("--weights", bin.weights, "mws fusion weights")->delimiter(',');
    cmd_bin->add_option("--patch-size", bin.patch_size, "process in patches of this size");
    cmd_bin->add_option("--stride", bin.stride, "patch stride (required with --patch-size)");
    cmd_bin->callback([&] { run_binarize(bin); });

    // evaluate
    EvaluateArgs ev;
    auto* cmd_eval = app.add_subcommand("evaluate", "score a prediction directory against ground truth");
    cmd_eval->add_option("--pred", ev.pred, "prediction image directory")->required();
    cmd_eval->add_option("--gt", ev.gt, "ground truth directory")->required();
    cmd_eval->add_option("--images", ev.images, "original image directory (defines the dataset)");
    cmd_eval->add_option("--out", ev.out, "output report JSON")->required();
    cmd_eval->add_option("--dataset", ev.dataset, "dataset label in the report");
    cmd_eval->add_option("--method-name", ev.method_name, "method label in the report");
    cmd_eval->add_option("--pred-foreground", ev.pred_foreground, "dark | light")
        ->check(CLI::IsMember({"dark", "light"}));
    cmd_eval->callback([&] { exit_code = run_evaluate(ev); });

    // rank
    std::vector<std::string> rank_reports;
    std::string rank_out;
    auto* cmd_rank = app.add_subcommand("rank", "aggregate reports into average metrics and ranks");
    cmd_rank->add_option("--reports", rank_reports, "report JSON files")->required()->expected(-1);
    cmd_rank->add_option("--out", rank_out, "output table (.md, .csv or .json)")->required();
    cmd_rank->callback([&] { run_rank(rank_reports, rank_out); });

    // report
    std::string rep_in, rep_format = "markdown";
    auto* cmd_rep = app.add_subcommand("report", "re-render a report JSON");
    cmd_rep->add_option("--in", rep_in, "report JSON file")->required();
    cmd_rep->add_option("--format", rep_format, "json | csv | markdown");
    cmd_rep->callback([&] { run_report(rep_in, rep_format); });

    // patch
    auto* cmd_patch = app.add_subcommand("patch", "patch protocol utilities");
    cmd_patch->require_subcommand(1);
    std::string ps_in, ps_out;
    int ps_size = 0, ps_stride = 0;
    auto* cmd_split = cmd_patch->add_subcommand("split", "split images into patches");
    cmd_split->add_option("--input", ps_in, "input image directory")->required();
    cmd_split->add_option("--output", ps_out, "patch output directory")->required();
    cmd_split->add_option("--patch-size", ps_size, "patch size in pixels")->required();
    cmd_split->add_option("--stride", ps_stride, "patch stride in pixels")->required();
    cmd_split->callback([&] { run_patch_split(ps_in, ps_out, ps_size, ps_stride); });

    std::string st_in, st_out;
    auto* cmd_stitch = cmd_patch->add_subcommand("stitch", "reassemble patches into images");
    cmd_stitch->add_option("--input", st_in, "patch directory with .grid.json sidecars")->required();
    cmd_stitch->add_option("--output", st_out, "output image directory")->required();
    cmd_stitch->callback([&] { run_patch_stitch(st_in, st_out); });

    // overlay
    std::string ov_pred, ov_gt, ov_out, ov_polarity = "dark";
    auto* cmd_overlay = app.add_subcommand("overlay", "render an FP/FN error overlay");
    cmd_overlay->add_option("--pred", ov_pred, "prediction image")->required();
    cmd_overlay->add_option("--gt", ov_gt, "ground truth image")->required();
    cmd_overlay->add_option("--out", ov_out, "output PNG")->required();
    cmd_overlay->add_option("--pred-foreground", ov_polarity, "dark | light")
        ->check(CLI::IsMember({"dark", "light"}));
    cmd_overlay->callback([&] { run_overlay(ov_pred, ov_gt, ov_out, ov_polarity); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage/config errors -> 1
    } catch (const binaq::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const binaq::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return exit_code;
}
