#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mrseg {

// Shortest round-trip decimal representation; locale-independent, so
// report files are byte-stable across runs and machines.
std::string format_number(double v);

// One (case, comparison, metric) measurement; nullopt renders as "NA".
struct MetricRow {
    std::string case_id;
    std::string comparison_id;
    std::string metric;
    std::optional<double> value;

    bool operator==(const MetricRow&) const = default;
};

struct MetricReport {
    std::vector<MetricRow> rows;

    void add(std::string case_id, std::string comparison_id, std::string metric,
             std::optional<double> value);

    // Stable output order: (case_id, comparison_id, metric).
    void sort();

    // Per-case values of one (comparison, metric) series; NA rows skipped.
    std::map<std::string, double> series(const std::string& comparison_id,
                                         const std::string& metric) const;

    std::vector<std::string> comparison_ids() const;
    std::vector<std::string> metrics_of(const std::string& comparison_id) const;
};

void write_metric_csv(const MetricReport& report, const std::filesystem::path& path);
void write_metric_json(const MetricReport& report, const std::filesystem::path& path);
MetricReport read_metric_csv(const std::filesystem::path& path);

}  // namespace mrseg
