#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "binaq/dataset.hpp"
#include "binaq/errors.hpp"
#include "binaq/harness.hpp"
#include "binaq/image_io.hpp"
#include "binaq/report.hpp"
#include "reference_tables.hpp"
#include "synthetic.hpp"

using namespace binaq;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / "binaq_test_harness" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

RunReport reference_report() {
    RunReport report;
    for (const auto& row : reference::kMethods) {
        MethodReport method;
        method.source_kind = "predictions";
        method.source_detail = "reference table";
        for (size_t d = 0; d < reference::kDatasets.size(); ++d) {
            DatasetEval eval;
            for (int m = 0; m < 4; ++m) {
                eval.means[m].value = row.per_dataset[d][m];
                eval.means[m].included = 1;
            }
            method.datasets.emplace(reference::kDatasets[d], eval);
        }
        report.methods.emplace(row.name, method);
    }
    return report;
}

// Ground truth with a planted confusion pattern against it.
struct PlantedPair {
    BinaryImage gt;
    BinaryImage pred;
};

PlantedPair planted(int tp, int fp, int fn) {
    BinaryImage gt(32, 32, false);
    BinaryImage pred(32, 32, false);
    int placed_tp = 0, placed_fp = 0, placed_fn = 0;
    for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
            if (placed_tp < tp) {
                gt.set(x, y, true);
                pred.set(x, y, true);
                ++placed_tp;
            } else if (placed_fn < fn) {
                gt.set(x, y, true);
                ++placed_fn;
            } else if (placed_fp < fp) {
                pred.set(x, y, true);
                ++placed_fp;
            }
        }
    }
    return {gt, pred};
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("dataset discovery matches stems across suffixes and extensions") {
    const fs::path images = fresh_dir("disc_images");
    const fs::path gts = fresh_dir("disc_gt");
    std::mt19937 rng(149);
    const RasterImage img = synth::random_raster(24, 16, rng);
    save_raster(img, images / "PR01.bmp");
    save_raster(img, gts / "PR01_GT.tiff");

    const auto entries = discover_dataset(images, gts);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].id == "PR01");
    CHECK(entries[0].image_path.filename() == "PR01.bmp");
    CHECK(entries[0].gt_path.filename() == "PR01_GT.tiff");
}

TEST_CASE("discovery failures are aggregated and name every orphan") {
    const fs::path images = fresh_dir("orph_images");
    const fs::path gts = fresh_dir("orph_gt");
    std::mt19937 rng(151);
    save_raster(synth::random_raster(8, 8, rng), images / "a.png");
    save_raster(synth::random_raster(8, 8, rng), images / "b.png");
    try {
        discover_dataset(images, gts);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("a.png") != std::string::npos);
        CHECK(msg.find("b.png") != std::string::npos);
    }
}

TEST_CASE("discovery sorts by id and checks dimensions") {
    const fs::path images = fresh_dir("sort_images");
    const fs::path gts = fresh_dir("sort_gt");
    std::mt19937 rng(157);
    save_raster(synth::random_raster(8, 8, rng), images / "b.png");
    save_raster(synth::random_raster(8, 8, rng), images / "a.png");
    save_raster(synth::random_raster(8, 8, rng), gts / "a_GT.png");
    save_raster(synth::random_raster(8, 8, rng), gts / "b_gt.png");
    const auto entries = discover_dataset(images, gts);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].id == "a");
    CHECK(entries[1].id == "b");

    save_raster(synth::random_raster(9, 8, rng), gts / "a_GT.png"); // now mismatched
    CHECK_THROWS_AS(discover_dataset(images, gts), ShapeError);
}

TEST_CASE("evaluating the ground truth as predictions is perfect") {
    const fs::path gts = fresh_dir("identity_gt");
    std::mt19937 rng(163);
    for (int i = 0; i < 3; ++i) {
        const BinaryImage gt = synth::text_like_gt(48, 40, rng);
        save_binary(gt, gts / ("img" + std::to_string(i) + "_GT.png"));
    }
    const auto entries = discover_dataset(gts, gts);
    std::vector<std::string> warnings;
    const DatasetEval eval = evaluate(MethodSource::predictions(gts, "identity"), entries,
                                      &warnings);
    CHECK(*eval.means[static_cast<int>(MetricKind::Fm)].value == 1.0);
    CHECK(*eval.means[static_cast<int>(MetricKind::Pfm)].value == 1.0);
    CHECK(*eval.means[static_cast<int>(MetricKind::Drd)].value == 0.0);
    // Every pair is identical, so the PSNR mean has nothing to average.
    const MetricMean& psnr_mean = eval.means[static_cast<int>(MetricKind::Psnr)];
    CHECK(!psnr_mean.value.has_value());
    CHECK(psnr_mean.excluded == 3);
    CHECK(psnr_mean.excluded_reason == "psnr_infinite");
    CHECK(warnings.size() == 3);
}

TEST_CASE("dataset means average per-image scores") {
    const fs::path gts = fresh_dir("mean_gt");
    const fs::path preds = fresh_dir("mean_pred");
    // fm 0.9: tp=9, fp=1, fn=1; fm 0.7: tp=7, fp=3, fn=3.
    const PlantedPair a = planted(9, 1, 1);
    const PlantedPair b = planted(7, 3, 3);
    save_binary(a.gt, gts / "a_GT.png");
    save_binary(b.gt, gts / "b_GT.png");
    save_binary(a.pred, preds / "a.png");
    save_binary(b.pred, preds / "b.png");

    const auto entries = discover_dataset(preds, gts);
    const DatasetEval eval = evaluate(MethodSource::predictions(preds), entries);
    CHECK(*eval.per_image.at("a").fm == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(*eval.per_image.at("b").fm == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(*eval.means[static_cast<int>(MetricKind::Fm)].value ==
          doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("missing predictions are reported by id") {
    const fs::path gts = fresh_dir("missing_gt");
    const fs::path preds = fresh_dir("missing_pred");
    std::mt19937 rng(167);
    const BinaryImage gt = synth::text_like_gt(32, 32, rng);
    save_binary(gt, gts / "present_GT.png");
    save_binary(gt, preds / "present.png");
    save_binary(gt, gts / "absent_GT.png");

    // Dataset defined by the GT side; use gt dir as the image side too.
    const auto entries = discover_dataset(gts, gts);
    try {
        evaluate(MethodSource::predictions(preds), entries);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("absent") != std::string::npos);
    }
}

TEST_CASE("builtin otsu clears a clean bimodal corpus") {
    const fs::path images = fresh_dir("otsu_images");
    const fs::path gts = fresh_dir("otsu_gt");
    std::mt19937 rng(173);
    for (int i = 0; i < 4; ++i) {
        const BinaryImage gt = synth::text_like_gt(160, 120, rng);
        save_binary(gt, gts / ("p" + std::to_string(i) + "_GT.png"));
        save_raster(synth::render_bimodal(gt, rng), images / ("p" + std::to_string(i) + ".png"));
    }
    const auto entries = discover_dataset(images, gts);
    const DatasetEval eval = evaluate(MethodSource::builtin("otsu"), entries);
    CHECK(*eval.means[static_cast<int>(MetricKind::Fm)].value >= 0.99);
}

TEST_CASE("aggregate_metrics reproduces the published averages") {
    const RunReport report = reference_report();
    const auto means = aggregate_metrics(report);
    for (size_t i = 0; i < reference::kMethods.size(); ++i) {
        const auto& row = reference::kMethods[i];
        for (int m = 0; m < 4; ++m) {
            CHECK(format2(means.at(row.name)[m]) == reference::kExpectedMeans[i][m]);
        }
    }
}

TEST_CASE("aggregation over a single dataset is the identity") {
    RunReport report;
    MethodReport method;
    DatasetEval eval;
    const double values[4] = {24.08, 97.68, 98.09, 1.11};
    for (int m = 0; m < 4; ++m) {
        eval.means[m].value = values[m];
        eval.means[m].included = 1;
    }
    method.datasets.emplace("only", eval);
    report.methods.emplace("solo", method);
    const auto means = aggregate_metrics(report);
    for (int m = 0; m < 4; ++m) {
        CHECK(means.at("solo")[m] == values[m]);
    }
    CHECK(rank_methods(report).at("solo") == 1.0);
}

TEST_CASE("aggregation names the missing cell") {
    RunReport report = reference_report();
    report.methods.at("SAE").datasets.at("dibco2018").means[2].value.reset();
    try {
        aggregate_metrics(report);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("SAE") != std::string::npos);
        CHECK(msg.find("dibco2018") != std::string::npos);
        CHECK(msg.find("pfm") != std::string::npos);
    }
}

TEST_CASE("rank_methods reproduces the published average ranks") {
    const auto ranks = rank_methods(reference_report());
    for (size_t i = 0; i < reference::kMethods.size(); ++i) {
        CHECK(format2(ranks.at(reference::kMethods[i].name)) == reference::kExpectedRanks[i]);
    }
}

TEST_CASE("tied methods share the mean of their positions") {
    RunReport report;
    for (const char* name : {"first", "second"}) {
        MethodReport method;
        DatasetEval eval;
        for (int m = 0; m < 4; ++m) {
            eval.means[m].value = 10.0;
            eval.means[m].included = 1;
        }
        method.datasets.emplace("ds", eval);
        report.methods.emplace(name, method);
    }
    const auto ranks = rank_methods(report);
    CHECK(ranks.at("first") == 1.5);
    CHECK(ranks.at("second") == 1.5);
}

TEST_CASE("a method dominating every cell ranks at least as well") {
    std::mt19937 rng(401);
    RunReport report;
    std::uniform_real_distribution<double> unit(0.1, 0.9);
    // Shared per-cell bases so domination holds cell by cell; DRD is
    // lower-better so "strong" subtracts there.
    MethodReport strong, weak, other;
    for (const char* ds : {"d1", "d2", "d3"}) {
        DatasetEval s, w, o;
        for (int m = 0; m < 4; ++m) {
            const double base = unit(rng);
            const double delta = m == 3 ? -0.05 : 0.05;
            s.means[m].value = base + delta;
            w.means[m].value = base - delta;
            o.means[m].value = unit(rng);
            s.means[m].included = w.means[m].included = o.means[m].included = 1;
        }
        strong.datasets.emplace(ds, s);
        weak.datasets.emplace(ds, w);
        other.datasets.emplace(ds, o);
    }
    report.methods.emplace("strong", strong);
    report.methods.emplace("weak", weak);
    report.methods.emplace("other", other);
    const auto ranks = rank_methods(report);
    CHECK(ranks.at("strong") <= ranks.at("weak"));
}

TEST_CASE("worker pool size does not affect results") {
    const fs::path gts = fresh_dir("pool_gt");
    const fs::path preds = fresh_dir("pool_pred");
    std::mt19937 rng(409);
    for (int i = 0; i < 6; ++i) {
        const BinaryImage gt = synth::text_like_gt(48, 48, rng);
        BinaryImage pred = gt;
        pred.set(2 * i, i, !gt.foreground(2 * i, i));
        save_binary(gt, gts / ("p" + std::to_string(i) + "_GT.png"));
        save_binary(pred, preds / ("p" + std::to_string(i) + ".png"));
    }
    const auto entries = discover_dataset(preds, gts);

    auto snapshot = [&] {
        RunReport report;
        MethodReport method;
        method.datasets.emplace("ds", evaluate(MethodSource::predictions(preds), entries));
        report.methods.emplace("m", method);
        return emit_report(report, ReportFormat::Json);
    };
    setenv("BINAQ_THREADS", "1", 1);
    const std::string serial = snapshot();
    setenv("BINAQ_THREADS", "4", 1);
    const std::string parallel = snapshot();
    unsetenv("BINAQ_THREADS");
    CHECK(serial == parallel);
}

TEST_CASE("rank and aggregate ignore method insertion order") {
    RunReport forward = reference_report();
    RunReport backward;
    for (auto it = forward.methods.rbegin(); it != forward.methods.rend(); ++it) {
        backward.methods.emplace(it->first, it->second);
    }
    CHECK(rank_methods(forward) == rank_methods(backward));
    CHECK(aggregate_metrics(forward) == aggregate_metrics(backward));
}

TEST_CASE("throughput measurement") {
    const fs::path images = fresh_dir("tp_images");
    const fs::path gts = fresh_dir("tp_gt");
    std::mt19937 rng(179);
    for (int i = 0; i < 6; ++i) {
        const BinaryImage gt = synth::text_like_gt(96, 96, rng);
        save_binary(gt, gts / ("t" + std::to_string(i) + "_GT.png"));
        save_raster(synth::render_bimodal(gt, rng), images / ("t" + std::to_string(i) + ".png"));
    }
    const auto entries = discover_dataset(images, gts);
    const ThroughputResult r = measure_throughput(MethodSource::builtin("sauvola"), entries);
    CHECK(r.images == 6);
    CHECK(r.images_per_sec > 0.0);
    CHECK(std::isfinite(r.images_per_sec));

    CHECK_THROWS_AS(measure_throughput(MethodSource::predictions(images), entries),
                    UnsupportedOperationError);
}

TEST_CASE("throughput is roughly stable when the corpus is doubled") {
    const fs::path images = fresh_dir("tps_images");
    const fs::path gts = fresh_dir("tps_gt");
    std::mt19937 rng(181);
    for (int i = 0; i < 16; ++i) {
        const BinaryImage gt = synth::text_like_gt(256, 256, rng);
        const std::string id = (i < 8 ? "a" : "b") + std::to_string(i % 8);
        save_binary(gt, gts / (id + "_GT.png"));
        save_raster(synth::render_bimodal(gt, rng), images / (id + ".png"));
    }
    const auto all = discover_dataset(images, gts);
    const std::vector<DatasetEntry> half(all.begin(), all.begin() + 8);
    const MethodSource sauvola = MethodSource::builtin("sauvola");

    // Wall-clock ratios are noisy in shared environments; take the best of
    // three attempts before declaring instability.
    bool stable = false;
    for (int attempt = 0; attempt < 3 && !stable; ++attempt) {
        const double single = measure_throughput(sauvola, half).images_per_sec;
        const double doubled = measure_throughput(sauvola, all).images_per_sec;
        stable = doubled > 0.75 * single && doubled < 1.25 * single;
    }
    CHECK(stable);
}

TEST_CASE("overlay colors match the legend") {
    std::mt19937 rng(191);
    const BinaryImage gt = synth::random_mixed_binary(8, 8, 0.5, rng);
    const RgbImage same = overlay_errors(gt, gt);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            const bool black = same.channel(x, y, 0) == 0 && same.channel(x, y, 1) == 0 &&
                               same.channel(x, y, 2) == 0;
            const bool white = same.channel(x, y, 0) == 255 && same.channel(x, y, 1) == 255 &&
                               same.channel(x, y, 2) == 255;
            CHECK((black || white));
        }
    }

    const RgbImage cyan = overlay_errors(BinaryImage(4, 4, true), BinaryImage(4, 4, false));
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            CHECK(cyan.channel(x, y, 0) == 0);
            CHECK(cyan.channel(x, y, 1) == 255);
            CHECK(cyan.channel(x, y, 2) == 255);
        }
    }

    // One pixel of each confusion class.
    BinaryImage pred(2, 2, false), gt2(2, 2, false);
    pred.set(0, 0, true);
    gt2.set(0, 0, true);  // TP
    pred.set(1, 0, true); // FP
    gt2.set(0, 1, true);  // FN
    const RgbImage quad = overlay_errors(pred, gt2);
    CHECK(quad.channel(0, 0, 0) == 0);   // black
    CHECK(quad.channel(1, 0, 1) == 255); // cyan
    CHECK(quad.channel(0, 1, 0) == 255); // orange
    CHECK(quad.channel(0, 1, 1) == 165);
    CHECK(quad.channel(1, 1, 0) == 255); // white
}

TEST_CASE("report emission and round trip") {
    RunReport report = reference_report();
    report.provenance.version = tool_version();
    report.provenance.created = "2024-01-01T00:00:00Z";
    report.provenance.config_hash = fnv1a_hex("fixture");
    finalize_report(report);

    const std::string json_text = emit_report(report, ReportFormat::Json);
    const RunReport parsed = parse_report_json(json_text);
    CHECK(emit_report(parsed, ReportFormat::Json) == json_text);

    const std::string md = emit_report(report, ReportFormat::Markdown);
    CHECK(md.find("## dibco2013") != std::string::npos);
    CHECK(md.find("**24.08**") != std::string::npos); // best PSNR cell is bold
    CHECK(md.find("PSNR ↑") != std::string::npos);
    CHECK(md.find("DRD ↓") != std::string::npos);

    const std::string csv = emit_report(report, ReportFormat::Csv);
    CHECK(csv.find("cross_mean,DE-GAN") != std::string::npos);
}

TEST_CASE("markdown renders one row per method") {
    RunReport report;
    MethodReport method;
    DatasetEval eval;
    MetricScores s;
    s.fm = 0.5;
    s.psnr = 20.0;
    s.pfm = 0.5;
    s.drd = 1.0;
    eval.per_image.emplace("img1", s);
    for (int m = 0; m < 4; ++m) {
        eval.means[m].value = 1.0;
        eval.means[m].included = 1;
    }
    method.datasets.emplace("ds", eval);
    report.methods.emplace("only", method);
    const std::string md = emit_report(report, ReportFormat::Markdown);
    CHECK(md.find("| only |") != std::string::npos);
}

TEST_CASE("infinite psnr survives the JSON round trip") {
    RunReport report;
    MethodReport method;
    DatasetEval eval;
    MetricScores s;
    s.fm = 1.0;
    s.recall = 1.0;
    s.precision = 1.0;
    s.pfm = 1.0;
    s.p_recall = 1.0;
    s.p_precision = 1.0;
    s.psnr = std::numeric_limits<double>::infinity();
    s.drd = 0.0;
    s.counts = {10, 0, 0, 90};
    eval.per_image.emplace("perfect", s);
    eval.means[0].excluded = 1;
    eval.means[0].excluded_reason = "psnr_infinite";
    for (int m = 1; m < 4; ++m) {
        eval.means[m].value = m == 3 ? 0.0 : 1.0;
        eval.means[m].included = 1;
    }
    method.datasets.emplace("ds", eval);
    report.methods.emplace("identity", method);

    const std::string text = emit_report(report, ReportFormat::Json);
    const RunReport back = parse_report_json(text);
    const MetricScores& restored = back.methods.at("identity").datasets.at("ds").per_image.at("perfect");
    REQUIRE(restored.psnr.has_value());
    CHECK(std::isinf(*restored.psnr));
    CHECK(!back.methods.at("identity").datasets.at("ds").means[0].value.has_value());
}

TEST_CASE("evaluation reports are deterministic") {
    const fs::path gts = fresh_dir("det_gt");
    const fs::path preds = fresh_dir("det_pred");
    std::mt19937 rng(193);
    for (int i = 0; i < 3; ++i) {
        const BinaryImage gt = synth::text_like_gt(40, 40, rng);
        BinaryImage pred = gt;
        pred.set(i, i, !gt.foreground(i, i));
        save_binary(gt, gts / ("d" + std::to_string(i) + "_GT.png"));
        save_binary(pred, preds / ("d" + std::to_string(i) + ".png"));
    }
    const auto entries = discover_dataset(preds, gts);

    auto run_once = [&] {
        RunReport report;
        report.provenance.version = tool_version();
        report.provenance.created = current_timestamp();
        report.provenance.config_hash = fnv1a_hex("det");
        MethodReport method;
        method.source_kind = "predictions";
        method.source_detail = "det";
        method.datasets.emplace("ds", evaluate(MethodSource::predictions(preds), entries,
                                               &report.warnings));
        report.methods.emplace("m", method);
        finalize_report(report);
        return emit_report(report, ReportFormat::Json);
    };
    const std::string first = run_once();
    const std::string second = run_once();
    CHECK(canonical_report_body(first) == canonical_report_body(second));
}

TEST_CASE("merge_reports combines methods and rejects conflicts") {
    RunReport a, b;
    MethodReport m1;
    DatasetEval eval;
    for (int m = 0; m < 4; ++m) {
        eval.means[m].value = 1.0;
        eval.means[m].included = 1;
    }
    m1.datasets.emplace("ds1", eval);
    a.methods.emplace("alpha", m1);

    MethodReport m2 = m1;
    m2.datasets.clear();
    m2.datasets.emplace("ds2", eval);
    b.methods.emplace("alpha", m2);

    const RunReport merged = merge_reports({a, b});
    CHECK(merged.methods.at("alpha").datasets.size() == 2);

    CHECK_THROWS_AS(merge_reports({a, a}), DataError);
}

TEST_CASE("BINAQ_THREADS caps the worker pool") {
    setenv("BINAQ_THREADS", "1", 1);
    CHECK(worker_count(8) == 1);
    setenv("BINAQ_THREADS", "notanumber", 1);
    CHECK_THROWS_AS(worker_count(8), ConfigError);
    unsetenv("BINAQ_THREADS");
    CHECK(worker_count(8) >= 1);
    CHECK(worker_count(0) == 1);
}

TEST_CASE("round2 and format2") {
    CHECK(format2(13.965) == "13.97");
    CHECK(format2(5.944999999999999) == "5.95"); // FP dust below an exact boundary
    CHECK(format2(5.9449) == "5.94");
    CHECK(format2(2.4375) == "2.44");
    CHECK(format2(-1.005) == "-1.01"); // away from zero
    CHECK(round2(0.0) == 0.0);
}

} // TEST_SUITE
