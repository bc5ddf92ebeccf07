#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <tuple>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewm/format.hpp"

namespace ewm {

inline constexpr const char* kToolVersion = "0.1.0";

// Metric columns in report order (the KeyStep cosine is reported in the
// CLIP column).
inline constexpr std::array<const char*, 8> kMetricColumns = {
    "BLEU", "CLIP", "DYN", "Diversity", "SA", "Logic", "TA", "Scene"};

// One evaluated episode; absent inputs leave the corresponding score null.
struct EpisodeRecord {
    std::string task_id;
    std::string episode_id;
    bool failed = false;
    std::string error;
    std::optional<std::size_t> selected;  // index of the lowest-symH sample
    std::optional<double> bleu, clip, dyn, diversity, sa, logic, ta, scene;
    std::optional<double> keystep_mismatch;
    std::optional<double> semantic_combined;

    std::optional<double> metric(std::size_t column) const {
        switch (column) {
            case 0: return bleu;
            case 1: return clip;
            case 2: return dyn;
            case 3: return diversity;
            case 4: return sa;
            case 5: return logic;
            case 6: return ta;
            default: return scene;
        }
    }
};

struct MetricSummary {
    std::array<std::optional<double>, 8> means;
};

struct MetricReport {
    std::vector<EpisodeRecord> episodes;  // sorted by (task_id, episode_id)
    std::vector<std::pair<std::string, MetricSummary>> tasks;  // sorted by task_id
    MetricSummary overall;
    std::string config_hash;
    std::string tool_version = kToolVersion;

    bool any_failed() const {
        for (const auto& e : episodes)
            if (e.failed) return true;
        return false;
    }
};

namespace detail {

inline MetricSummary summarize(const std::vector<const EpisodeRecord*>& records) {
    MetricSummary s;
    for (std::size_t m = 0; m < kMetricColumns.size(); ++m) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const EpisodeRecord* r : records) {
            if (r->failed) continue;
            if (auto v = r->metric(m)) {
                sum += *v;
                ++n;
            }
        }
        if (n > 0) s.means[m] = sum / double(n);
    }
    return s;
}

}  // namespace detail

// Fills per-task and overall means; episodes are sorted by (task_id,
// episode_id) first so the output is independent of input order.
inline void aggregate_report(MetricReport& r) {
    std::sort(r.episodes.begin(), r.episodes.end(),
              [](const EpisodeRecord& a, const EpisodeRecord& b) {
                  return std::tie(a.task_id, a.episode_id) < std::tie(b.task_id, b.episode_id);
              });
    std::map<std::string, std::vector<const EpisodeRecord*>> by_task;
    std::vector<const EpisodeRecord*> all;
    for (const auto& e : r.episodes) {
        by_task[e.task_id].push_back(&e);
        all.push_back(&e);
    }
    r.tasks.clear();
    for (const auto& [task, records] : by_task)
        r.tasks.emplace_back(task, detail::summarize(records));
    r.overall = detail::summarize(all);
}

namespace detail {

inline std::string opt_str(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

inline std::string opt_str(const std::optional<std::size_t>& v) {
    return v ? std::to_string(*v) : std::string();
}

// Minimal CSV quoting; ids and errors may contain commas.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

inline std::string report_to_csv(const MetricReport& r) {
    std::string out = "kind,task_id,episode_id,selected";
    for (const char* col : kMetricColumns) out += std::string(",") + col;
    out += ",failed,error\n";
    if (r.episodes.empty()) return out;

    for (const auto& e : r.episodes) {
        out += "episode," + detail::csv_field(e.task_id) + "," + detail::csv_field(e.episode_id) +
               "," + detail::opt_str(e.selected);
        for (std::size_t m = 0; m < kMetricColumns.size(); ++m)
            out += "," + detail::opt_str(e.metric(m));
        out += e.failed ? ",1," : ",0,";
        out += detail::csv_field(e.error);
        out += "\n";
    }
    for (const auto& [task, summary] : r.tasks) {
        out += "task," + detail::csv_field(task) + ",,";
        for (const auto& v : summary.means) out += "," + detail::opt_str(v);
        out += ",,\n";
    }
    out += "overall,,,";
    for (const auto& v : r.overall.means) out += "," + detail::opt_str(v);
    out += ",,\n";
    return out;
}

inline nlohmann::ordered_json report_to_json(const MetricReport& r) {
    nlohmann::ordered_json doc;
    doc["tool_version"] = r.tool_version;
    doc["config_hash"] = r.config_hash;

    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    auto summary_json = [&](const MetricSummary& s) {
        nlohmann::ordered_json j;
        for (std::size_t m = 0; m < kMetricColumns.size(); ++m)
            j[kMetricColumns[m]] = opt(s.means[m]);
        return j;
    };

    auto episodes = nlohmann::ordered_json::array();
    for (const auto& e : r.episodes) {
        nlohmann::ordered_json j;
        j["task_id"] = e.task_id;
        j["episode_id"] = e.episode_id;
        j["failed"] = e.failed;
        if (e.failed) j["error"] = e.error;
        j["selected"] =
            e.selected ? nlohmann::ordered_json(*e.selected) : nlohmann::ordered_json(nullptr);
        for (std::size_t m = 0; m < kMetricColumns.size(); ++m)
            j[kMetricColumns[m]] = opt(e.metric(m));
        j["KeyStepMismatch"] = opt(e.keystep_mismatch);
        j["SemanticCombined"] = opt(e.semantic_combined);
        episodes.push_back(j);
    }
    doc["episodes"] = episodes;

    auto tasks = nlohmann::ordered_json::array();
    for (const auto& [task, summary] : r.tasks) {
        nlohmann::ordered_json j;
        j["task_id"] = task;
        j["means"] = summary_json(summary);
        tasks.push_back(j);
    }
    doc["tasks"] = tasks;
    doc["overall"] = summary_json(r.overall);
    return doc;
}

// One bar chart per metric: one bar per task plus an overall bar. Pure text
// output with pinned float formatting, so identical reports give identical
// bytes.
inline std::string metric_svg(const MetricReport& r, std::size_t metric) {
    struct Bar {
        std::string label;
        std::optional<double> value;
    };
    std::vector<Bar> bars;
    for (const auto& [task, summary] : r.tasks) bars.push_back({task, summary.means[metric]});
    bars.push_back({"overall", r.overall.means[metric]});

    double max_val = 0.0;
    for (const auto& b : bars)
        if (b.value && *b.value > max_val) max_val = *b.value;
    if (max_val <= 0.0) max_val = 1.0;

    const int width = 640, height = 360, margin = 40;
    const double plot_w = width - 2.0 * margin, plot_h = height - 2.0 * margin;
    const double slot = plot_w / double(bars.size());

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<text x=\"" + std::to_string(margin) + "\" y=\"24\" font-size=\"16\">" +
           std::string(kMetricColumns[metric]) + "</text>\n";
    for (std::size_t i = 0; i < bars.size(); ++i) {
        double x = margin + slot * double(i) + slot * 0.125;
        double w = slot * 0.75;
        double val = bars[i].value.value_or(0.0);
        double h = plot_h * (val / max_val);
        double y = margin + (plot_h - h);
        svg += "<rect x=\"" + format_double(x) + "\" y=\"" + format_double(y) + "\" width=\"" +
               format_double(w) + "\" height=\"" + format_double(h) +
               "\" fill=\"#4878a8\"/>\n";
        svg += "<text x=\"" + format_double(x) + "\" y=\"" + std::to_string(height - margin + 16) +
               "\" font-size=\"11\">" + bars[i].label + "</text>\n";
        svg += "<text x=\"" + format_double(x) + "\" y=\"" + format_double(y - 4) +
               "\" font-size=\"11\">" + (bars[i].value ? format_double(val) : "null") +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

// Writes report.<fmt> (and per-metric SVGs) under out_dir; returns the
// written paths in a fixed order.
inline std::vector<std::filesystem::path> emit_report(const MetricReport& r,
                                                      const std::vector<std::string>& formats,
                                                      const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    auto write_file = [&](const std::filesystem::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error(p.string() + ": cannot open for writing");
        out << content;
        written.push_back(p);
    };
    for (const std::string& fmt : formats) {
        if (fmt == "csv") {
            write_file(out_dir / "report.csv", report_to_csv(r));
        } else if (fmt == "json") {
            write_file(out_dir / "report.json", report_to_json(r).dump(2) + "\n");
        } else if (fmt == "svg") {
            for (std::size_t m = 0; m < kMetricColumns.size(); ++m)
                write_file(out_dir / ("metric_" + std::string(kMetricColumns[m]) + ".svg"),
                           metric_svg(r, m));
        } else {
            throw std::invalid_argument("unknown report format: " + fmt);
        }
    }
    return written;
}

}  // namespace ewm
