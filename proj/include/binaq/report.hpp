#pragma once

#include <map>
#include <optional>
#include <string>

#include "binaq/harness.hpp"

namespace binaq {

struct Provenance {
    std::string tool = "binaq";
    std::string version;
    std::string config_hash;
    std::string created; // ISO-8601; excluded from the canonical body
    std::string hardware;
};

struct MethodReport {
    std::string source_kind;   // "builtin" | "predictions"
    std::string source_detail; // algorithm/parameters or directory
    std::map<std::string, DatasetEval> datasets;
    std::array<std::optional<double>, 4> cross_means{}; // by MetricKind
    std::optional<double> average_rank;
    std::optional<double> throughput_ips;
};

struct RunReport {
    Provenance provenance;
    std::map<std::string, MethodReport> methods; // method name -> report
    std::vector<std::string> warnings;
};

// Arithmetic mean over datasets for each metric, full precision.
// Throws DataError naming (method, dataset, metric) for any missing cell.
std::map<std::string, std::array<double, 4>> aggregate_metrics(const RunReport& report);

// Fractional (mean-position) ranks per (dataset, metric), 1 = best,
// averaged over the whole grid. Same completeness requirement as above.
std::map<std::string, double> rank_methods(const RunReport& report);

// Fills cross_means and average_rank on every method in place.
void finalize_report(RunReport& report);

enum class ReportFormat { Json, Csv, Markdown };

// Renders the report. JSON keeps full precision, serializes undefined cells
// as nulls with reason strings and infinite PSNR as "inf"; CSV emits one row
// per (method, dataset, image) plus summary rows; Markdown renders
// per-dataset tables with direction arrows and best-per-column boldface.
std::string emit_report(const RunReport& report, ReportFormat format);

RunReport parse_report_json(const std::string& text);
RunReport load_report(const std::filesystem::path& path);

// Merges methods/datasets of several reports (rank input). Throws DataError
// on a conflicting (method, dataset) cell.
RunReport merge_reports(const std::vector<RunReport>& reports);

// Report JSON with the volatile provenance fields removed; two runs over
// identical inputs produce byte-identical canonical bodies.
std::string canonical_report_body(const std::string& report_json);

// Rounding used for all 2-decimal rendering: half away from zero, with a
// 1e-7 guard absorbing accumulated FP error in sums of 2-decimal inputs.
double round2(double v);
std::string format2(double v);

std::string fnv1a_hex(const std::string& text);
std::string current_timestamp();
std::string tool_version();

} // namespace binaq
