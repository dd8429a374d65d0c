#include "binaq/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "binaq/errors.hpp"

namespace binaq {

using nlohmann::json;

double round2(double v) {
    if (!std::isfinite(v)) return v;
    return std::copysign(std::floor(std::abs(v) * 100.0 + 0.5 + 1e-7), v) / 100.0;
}

std::string format2(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", round2(v));
    return buf;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string current_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string tool_version() { return "0.1.0"; }

namespace {

// Shortest round-trip decimal representation.
std::string dstr(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

json value_to_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
    return *v;
}

std::optional<double> value_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw FormatError("report: unexpected metric string '" + s + "'");
    }
    return j.get<double>();
}

json scores_to_json(const MetricScores& s) {
    json j;
    j["psnr"] = value_to_json(s.psnr);
    j["fm"] = value_to_json(s.fm);
    j["pfm"] = value_to_json(s.pfm);
    j["drd"] = value_to_json(s.drd);
    j["recall"] = value_to_json(s.recall);
    j["precision"] = value_to_json(s.precision);
    j["p_recall"] = value_to_json(s.p_recall);
    j["p_precision"] = value_to_json(s.p_precision);
    if (!s.fm_reason.empty()) j["fm_reason"] = s.fm_reason;
    if (!s.pfm_reason.empty()) j["pfm_reason"] = s.pfm_reason;
    if (!s.psnr_reason.empty()) j["psnr_reason"] = s.psnr_reason;
    if (!s.drd_reason.empty()) j["drd_reason"] = s.drd_reason;
    j["counts"] = {{"tp", s.counts.tp}, {"fp", s.counts.fp}, {"fn", s.counts.fn}, {"tn", s.counts.tn}};
    return j;
}

MetricScores scores_from_json(const json& j) {
    MetricScores s;
    s.psnr = value_from_json(j.at("psnr"));
    s.fm = value_from_json(j.at("fm"));
    s.pfm = value_from_json(j.at("pfm"));
    s.drd = value_from_json(j.at("drd"));
    s.recall = value_from_json(j.value("recall", json{}));
    s.precision = value_from_json(j.value("precision", json{}));
    s.p_recall = value_from_json(j.value("p_recall", json{}));
    s.p_precision = value_from_json(j.value("p_precision", json{}));
    s.fm_reason = j.value("fm_reason", "");
    s.pfm_reason = j.value("pfm_reason", "");
    s.psnr_reason = j.value("psnr_reason", "");
    s.drd_reason = j.value("drd_reason", "");
    if (j.contains("counts")) {
        const json& c = j.at("counts");
        s.counts = {c.at("tp").get<std::uint64_t>(), c.at("fp").get<std::uint64_t>(),
                    c.at("fn").get<std::uint64_t>(), c.at("tn").get<std::uint64_t>()};
    }
    return s;
}

json mean_to_json(const MetricMean& m) {
    json j;
    j["value"] = value_to_json(m.value);
    j["included"] = m.included;
    j["excluded"] = m.excluded;
    if (!m.excluded_reason.empty()) j["reason"] = m.excluded_reason;
    return j;
}

MetricMean mean_from_json(const json& j) {
    MetricMean m;
    if (j.is_number()) {
        // Fixture shorthand: a bare number is the mean itself.
        m.value = j.get<double>();
        m.included = 1;
        return m;
    }
    m.value = value_from_json(j.at("value"));
    m.included = j.value("included", 0);
    m.excluded = j.value("excluded", 0);
    m.excluded_reason = j.value("reason", "");
    return m;
}

} // namespace

std::map<std::string, std::array<double, 4>> aggregate_metrics(const RunReport& report) {
    std::set<std::string> all_datasets;
    for (const auto& [name, method] : report.methods) {
        for (const auto& [ds, eval] : method.datasets) all_datasets.insert(ds);
    }
    if (all_datasets.empty()) {
        throw DataError("aggregate_metrics: report contains no datasets");
    }

    std::map<std::string, std::array<double, 4>> out;
    for (const auto& [name, method] : report.methods) {
        std::array<double, 4> means{};
        for (MetricKind m : kAllMetrics) {
            double sum = 0.0;
            for (const std::string& ds : all_datasets) {
                auto it = method.datasets.find(ds);
                if (it == method.datasets.end() ||
                    !it->second.means[static_cast<int>(m)].value) {
                    throw DataError("aggregate_metrics: missing value for (method '" + name +
                                    "', dataset '" + ds + "', metric '" + metric_key(m) + "')");
                }
                sum += *it->second.means[static_cast<int>(m)].value;
            }
            means[static_cast<int>(m)] = sum / static_cast<double>(all_datasets.size());
        }
        out.emplace(name, means);
    }
    return out;
}

std::map<std::string, double> rank_methods(const RunReport& report) {
    std::set<std::string> all_datasets;
    for (const auto& [name, method] : report.methods) {
        for (const auto& [ds, eval] : method.datasets) all_datasets.insert(ds);
    }
    if (all_datasets.empty() || report.methods.empty()) {
        throw DataError("rank_methods: nothing to rank");
    }

    std::vector<std::string> names;
    for (const auto& [name, method] : report.methods) names.push_back(name);

    std::map<std::string, double> rank_sum;
    for (const auto& name : names) rank_sum[name] = 0.0;

    int cells = 0;
    for (const std::string& ds : all_datasets) {
        for (MetricKind m : kAllMetrics) {
            ++cells;
            std::vector<std::pair<double, std::string>> scored;
            for (const auto& name : names) {
                const auto& method = report.methods.at(name);
                auto it = method.datasets.find(ds);
                if (it == method.datasets.end() ||
                    !it->second.means[static_cast<int>(m)].value) {
                    throw DataError("rank_methods: missing value for (method '" + name +
                                    "', dataset '" + ds + "', metric '" + metric_key(m) + "')");
                }
                scored.emplace_back(*it->second.means[static_cast<int>(m)].value, name);
            }
            const bool desc = higher_is_better(m);
            std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
                return desc ? a.first > b.first : a.first < b.first;
            });
            // Fractional ranks: tied values share the mean of their positions.
            size_t i = 0;
            while (i < scored.size()) {
                size_t j = i;
                while (j + 1 < scored.size() && scored[j + 1].first == scored[i].first) ++j;
                const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
                for (size_t k = i; k <= j; ++k) rank_sum[scored[k].second] += rank;
                i = j + 1;
            }
        }
    }

    std::map<std::string, double> out;
    for (const auto& [name, sum] : rank_sum) {
        out[name] = sum / static_cast<double>(cells);
    }
    return out;
}

void finalize_report(RunReport& report) {
    const auto means = aggregate_metrics(report);
    const auto ranks = rank_methods(report);
    for (auto& [name, method] : report.methods) {
        const auto& m = means.at(name);
        for (MetricKind k : kAllMetrics) {
            method.cross_means[static_cast<int>(k)] = m[static_cast<int>(k)];
        }
        method.average_rank = ranks.at(name);
    }
}

namespace {

json report_to_json(const RunReport& report) {
    json j;
    j["binaq_report"] = 1;
    j["provenance"] = {{"tool", report.provenance.tool},
                       {"version", report.provenance.version},
                       {"config_hash", report.provenance.config_hash},
                       {"created", report.provenance.created},
                       {"hardware", report.provenance.hardware}};
    j["warnings"] = report.warnings;
    json methods = json::object();
    for (const auto& [name, method] : report.methods) {
        json mj;
        mj["source"] = {{"kind", method.source_kind}, {"detail", method.source_detail}};
        json datasets = json::object();
        for (const auto& [ds, eval] : method.datasets) {
            json dj;
            json images = json::object();
            for (const auto& [id, scores] : eval.per_image) {
                images[id] = scores_to_json(scores);
            }
            dj["images"] = images;
            json means = json::object();
            for (MetricKind m : kAllMetrics) {
                means[metric_key(m)] = mean_to_json(eval.means[static_cast<int>(m)]);
            }
            dj["means"] = means;
            datasets[ds] = dj;
        }
        mj["datasets"] = datasets;
        json cross = json::object();
        for (MetricKind m : kAllMetrics) {
            cross[metric_key(m)] = value_to_json(method.cross_means[static_cast<int>(m)]);
        }
        mj["cross_dataset_means"] = cross;
        mj["average_rank"] = value_to_json(method.average_rank);
        mj["throughput_ips"] = value_to_json(method.throughput_ips);
        methods[name] = mj;
    }
    j["methods"] = methods;
    return j;
}

RunReport report_from_json(const json& j) {
    RunReport report;
    if (j.contains("provenance")) {
        const json& p = j.at("provenance");
        report.provenance.tool = p.value("tool", "");
        report.provenance.version = p.value("version", "");
        report.provenance.config_hash = p.value("config_hash", "");
        report.provenance.created = p.value("created", "");
        report.provenance.hardware = p.value("hardware", "");
    }
    if (j.contains("warnings")) {
        report.warnings = j.at("warnings").get<std::vector<std::string>>();
    }
    for (const auto& [name, mj] : j.at("methods").items()) {
        MethodReport method;
        if (mj.contains("source")) {
            method.source_kind = mj.at("source").value("kind", "");
            method.source_detail = mj.at("source").value("detail", "");
        }
        for (const auto& [ds, dj] : mj.at("datasets").items()) {
            DatasetEval eval;
            if (dj.contains("images")) {
                for (const auto& [id, sj] : dj.at("images").items()) {
                    eval.per_image.emplace(id, scores_from_json(sj));
                }
            }
            const json& means = dj.at("means");
            for (MetricKind m : kAllMetrics) {
                eval.means[static_cast<int>(m)] = mean_from_json(means.at(metric_key(m)));
            }
            method.datasets.emplace(ds, eval);
        }
        if (mj.contains("cross_dataset_means") && !mj.at("cross_dataset_means").is_null()) {
            for (MetricKind m : kAllMetrics) {
                method.cross_means[static_cast<int>(m)] =
                    value_from_json(mj.at("cross_dataset_means").value(metric_key(m), json{}));
            }
        }
        if (mj.contains("average_rank")) method.average_rank = value_from_json(mj.at("average_rank"));
        if (mj.contains("throughput_ips")) {
            method.throughput_ips = value_from_json(mj.at("throughput_ips"));
        }
        report.methods.emplace(name, method);
    }
    return report;
}

std::string csv_cell(const std::optional<double>& v) {
    if (!v) return "";
    if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
    return dstr(*v);
}

std::string emit_csv(const RunReport& report) {
    std::ostringstream out;
    out << "kind,method,dataset,image,psnr,fm,pfm,drd,recall,precision,p_recall,p_precision,"
           "tp,fp,fn,tn,avg_rank,throughput_ips\n";
    for (const auto& [name, method] : report.methods) {
        for (const auto& [ds, eval] : method.datasets) {
            for (const auto& [id, s] : eval.per_image) {
                out << "image," << name << ',' << ds << ',' << id << ',' << csv_cell(s.psnr) << ','
                    << csv_cell(s.fm) << ',' << csv_cell(s.pfm) << ',' << csv_cell(s.drd) << ','
                    << csv_cell(s.recall) << ',' << csv_cell(s.precision) << ','
                    << csv_cell(s.p_recall) << ',' << csv_cell(s.p_precision) << ',' << s.counts.tp
                    << ',' << s.counts.fp << ',' << s.counts.fn << ',' << s.counts.tn << ",,\n";
            }
            out << "dataset_mean," << name << ',' << ds << ",,";
            for (MetricKind m : kAllMetrics) {
                out << csv_cell(eval.means[static_cast<int>(m)].value)
                    << (m == MetricKind::Drd ? "" : ",");
            }
            out << ",,,,,,,,,,\n";
        }
        out << "cross_mean," << name << ",,,";
        for (MetricKind m : kAllMetrics) {
            out << csv_cell(method.cross_means[static_cast<int>(m)])
                << (m == MetricKind::Drd ? "" : ",");
        }
        out << ",,,,,,,,," << csv_cell(method.average_rank) << ','
            << csv_cell(method.throughput_ips) << '\n';
    }
    return out.str();
}

std::string md_arrow(MetricKind m) { return higher_is_better(m) ? "↑" : "↓"; }

std::string emit_markdown(const RunReport& report) {
    std::ostringstream out;
    std::set<std::string> all_datasets;
    for (const auto& [name, method] : report.methods) {
        for (const auto& [ds, eval] : method.datasets) all_datasets.insert(ds);
    }

    for (const std::string& ds : all_datasets) {
        out << "## " << ds << "\n\n";
        out << "| Model |";
        for (MetricKind m : kAllMetrics) out << ' ' << metric_display(m) << ' ' << md_arrow(m) << " |";
        out << "\n|---|";
        for (size_t i = 0; i < kAllMetrics.size(); ++i) out << "---:|";
        out << '\n';

        // Best defined value per column, direction-aware.
        std::array<std::optional<double>, 4> best;
        for (const auto& [name, method] : report.methods) {
            auto it = method.datasets.find(ds);
            if (it == method.datasets.end()) continue;
            for (MetricKind m : kAllMetrics) {
                const auto& v = it->second.means[static_cast<int>(m)].value;
                if (!v) continue;
                auto& b = best[static_cast<int>(m)];
                if (!b || (higher_is_better(m) ? *v > *b : *v < *b)) b = *v;
            }
        }
        for (const auto& [name, method] : report.methods) {
            auto it = method.datasets.find(ds);
            if (it == method.datasets.end()) continue;
            out << "| " << name << " |";
            for (MetricKind m : kAllMetrics) {
                const auto& v = it->second.means[static_cast<int>(m)].value;
                if (!v) {
                    out << " n/a |";
                    continue;
                }
                const auto& b = best[static_cast<int>(m)];
                const bool is_best = b && *v == *b;
                out << ' ' << (is_best ? "**" : "") << format2(*v) << (is_best ? "**" : "") << " |";
            }
            out << '\n';
        }
        out << '\n';
    }

    bool any_cross = false;
    for (const auto& [name, method] : report.methods) {
        if (method.cross_means[0] || method.average_rank) any_cross = true;
    }
    if (any_cross) {
        out << "## Average over datasets\n\n";
        out << "| Model |";
        for (MetricKind m : kAllMetrics) out << ' ' << metric_display(m) << ' ' << md_arrow(m) << " |";
        out << " Avg. rank ↓ | img/sec ↑ |\n|---|";
        for (size_t i = 0; i < kAllMetrics.size() + 2; ++i) out << "---:|";
        out << '\n';

        std::array<std::optional<double>, 4> best;
        std::optional<double> best_rank;
        for (const auto& [name, method] : report.methods) {
            for (MetricKind m : kAllMetrics) {
                const auto& v = method.cross_means[static_cast<int>(m)];
                if (!v) continue;
                auto& b = best[static_cast<int>(m)];
                if (!b || (higher_is_better(m) ? *v > *b : *v < *b)) b = *v;
            }
            if (method.average_rank && (!best_rank || *method.average_rank < *best_rank)) {
                best_rank = *method.average_rank;
            }
        }
        for (const auto& [name, method] : report.methods) {
            out << "| " << name << " |";
            for (MetricKind m : kAllMetrics) {
                const auto& v = method.cross_means[static_cast<int>(m)];
                if (!v) {
                    out << " n/a |";
                    continue;
                }
                const auto& b = best[static_cast<int>(m)];
                const bool is_best = b && *v == *b;
                out << ' ' << (is_best ? "**" : "") << format2(*v) << (is_best ? "**" : "") << " |";
            }
            if (method.average_rank) {
                const bool is_best = best_rank && *method.average_rank == *best_rank;
                out << ' ' << (is_best ? "**" : "") << format2(*method.average_rank)
                    << (is_best ? "**" : "") << " |";
            } else {
                out << " n/a |";
            }
            out << ' ' << (method.throughput_ips ? format2(*method.throughput_ips) : "n/a") << " |\n";
        }
        out << '\n';
    }
    return out.str();
}

} // namespace

std::string emit_report(const RunReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Json: return report_to_json(report).dump(2) + "\n";
        case ReportFormat::Csv: return emit_csv(report);
        case ReportFormat::Markdown: return emit_markdown(report);
    }
    throw ConfigError("unknown report format");
}

RunReport parse_report_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("report parse error: ") + e.what());
    }
    try {
        return report_from_json(j);
    } catch (const json::exception& e) {
        throw FormatError(std::string("report schema error: ") + e.what());
    }
}

RunReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read report: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_report_json(buf.str());
}

RunReport merge_reports(const std::vector<RunReport>& reports) {
    if (reports.empty()) {
        throw DataError("merge_reports: no reports given");
    }
    RunReport merged;
    merged.provenance = reports.front().provenance;
    std::string hash_input;
    for (const auto& r : reports) {
        hash_input += r.provenance.config_hash + ";";
        for (const auto& w : r.warnings) merged.warnings.push_back(w);
        for (const auto& [name, method] : r.methods) {
            auto [it, inserted] = merged.methods.emplace(name, method);
            if (inserted) continue;
            MethodReport& existing = it->second;
            for (const auto& [ds, eval] : method.datasets) {
                if (existing.datasets.count(ds)) {
                    throw DataError("merge_reports: method '" + name + "' has dataset '" + ds +
                                    "' in more than one report");
                }
                existing.datasets.emplace(ds, eval);
            }
            if (!existing.throughput_ips) existing.throughput_ips = method.throughput_ips;
        }
    }
    merged.provenance.config_hash = fnv1a_hex(hash_input);
    merged.provenance.created = current_timestamp();
    // Cross-dataset aggregates are stale after a merge.
    for (auto& [name, method] : merged.methods) {
        method.cross_means = {};
        method.average_rank.reset();
    }
    return merged;
}

std::string canonical_report_body(const std::string& report_json) {
    json j = json::parse(report_json);
    if (j.contains("provenance")) {
        j["provenance"].erase("created");
    }
    return j.dump(2) + "\n";
}

} // namespace binaq
