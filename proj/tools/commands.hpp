#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mrseg/metrics.hpp"

// Subcommand implementations behind the mrseg binary. Kept as a library
// so integration tests can run the pipeline in-process.
namespace mrseg::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kDiagnostics = 1;  // domain problems (bad data, failed cases)
inline constexpr int kUsage = 2;        // usage or I/O errors

int cmd_validate(const std::filesystem::path& manifest_path, std::ostream& out,
                 std::ostream& err);

struct FuseOptions {
    std::filesystem::path manifest_path;
    std::filesystem::path out_dir;
    std::string scheme = "majority";  // majority | random | mean | expert:<id>
    std::uint64_t seed = 0;
    unsigned threads = 1;
};
int cmd_fuse(const FuseOptions& opt, std::ostream& err);

struct EvalOptions {
    std::filesystem::path manifest_path;
    std::filesystem::path out_dir;
    MetricConfig metric;
    unsigned threads = 1;
};
int cmd_eval(const EvalOptions& opt, std::ostream& err);

struct StatsOptions {
    std::filesystem::path report_a;
    std::filesystem::path report_b;  // optional second report
    std::filesystem::path plan_path;
    std::filesystem::path out_dir;
    std::size_t bootstrap_r = 1000;
    double ci_level = 0.95;
    std::uint64_t seed = 0;
};
int cmd_stats(const StatsOptions& opt, std::ostream& err);

struct SimulateOptions {
    double p = 0.5;
    std::size_t experts = 3;
    std::string mode = "exact";  // exact | mc
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::filesystem::path csv_out;  // optional
};
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);

struct PlotOptions {
    std::filesystem::path report_path;
    std::string kind = "bland-altman";  // bland-altman | scatter
    std::string x_col;                  // "comparison_id/metric"
    std::string y_col;
    std::filesystem::path out_svg;
    double ci_level = 0.95;
};
int cmd_plot(const PlotOptions& opt, std::ostream& err);

}  // namespace mrseg::cli
