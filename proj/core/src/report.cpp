#include "mrseg/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mrseg/errors.hpp"

namespace mrseg {

std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void MetricReport::add(std::string case_id, std::string comparison_id,
                       std::string metric, std::optional<double> value) {
    rows.push_back({std::move(case_id), std::move(comparison_id), std::move(metric),
                    value});
}

void MetricReport::sort() {
    std::stable_sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
        return std::tie(a.case_id, a.comparison_id, a.metric) <
               std::tie(b.case_id, b.comparison_id, b.metric);
    });
}

std::map<std::string, double> MetricReport::series(const std::string& comparison_id,
                                                   const std::string& metric) const {
    std::map<std::string, double> out;
    for (const auto& r : rows)
        if (r.comparison_id == comparison_id && r.metric == metric && r.value)
            out[r.case_id] = *r.value;
    return out;
}

std::vector<std::string> MetricReport::comparison_ids() const {
    std::set<std::string> seen;
    for (const auto& r : rows) seen.insert(r.comparison_id);
    return {seen.begin(), seen.end()};
}

std::vector<std::string> MetricReport::metrics_of(const std::string& comparison_id) const {
    std::set<std::string> seen;
    for (const auto& r : rows)
        if (r.comparison_id == comparison_id) seen.insert(r.metric);
    return {seen.begin(), seen.end()};
}

void write_metric_csv(const MetricReport& report, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write: " + path.string());
    f << "case_id,comparison_id,metric,value\n";
    for (const auto& r : report.rows)
        f << r.case_id << ',' << r.comparison_id << ',' << r.metric << ','
          << (r.value ? format_number(*r.value) : "NA") << '\n';
    if (!f) throw IoError("write failed: " + path.string());
}

void write_metric_json(const MetricReport& report, const std::filesystem::path& path) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row{{"case_id", r.case_id},
                           {"comparison_id", r.comparison_id},
                           {"metric", r.metric}};
        if (r.value)
            row["value"] = *r.value;
        else
            row["value"] = nullptr;
        doc.push_back(std::move(row));
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write: " + path.string());
    f << doc.dump(2) << '\n';
}

MetricReport read_metric_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path.string());

    MetricReport out;
    std::string line;
    if (!std::getline(f, line) || line != "case_id,comparison_id,metric,value")
        throw FormatError("unexpected metric CSV header in " + path.string());
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        MetricRow row;
        std::string value;
        if (!std::getline(ss, row.case_id, ',') ||
            !std::getline(ss, row.comparison_id, ',') ||
            !std::getline(ss, row.metric, ',') || !std::getline(ss, value))
            throw FormatError("malformed metric CSV row: " + line);
        if (value != "NA") {
            double v = 0.0;
            const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
            if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
                throw FormatError("bad number in metric CSV: " + value);
            row.value = v;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace mrseg
