#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("MRSEG_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-rater segmentation evaluation and label-fusion toolkit"};
    app.require_subcommand(1);

    std::string manifest;

    auto* validate = app.add_subcommand("validate", "Check a manifest and its mask files");
    validate->add_option("manifest", manifest, "Manifest JSON path")->required();

    mrseg::cli::FuseOptions fuse_opt;
    fuse_opt.seed = default_seed();
    auto* fuse = app.add_subcommand("fuse", "Fuse expert masks per case");
    fuse->add_option("--manifest",fuse_opt.manifest_path, "Manifest JSON path")->required();
    fuse->add_option("--scheme", fuse_opt.scheme,
                     "majority | random | mean | expert:<id>");
    fuse->add_option("--seed", fuse_opt.seed, "Seed for random expert sampling");
    fuse->add_option("--out", fuse_opt.out_dir, "Output directory")->required();
    fuse->add_option("--threads", fuse_opt.threads, "Worker threads");

    mrseg::cli::EvalOptions eval_opt;
    std::string eval_config;
    auto* eval = app.add_subcommand("eval", "Score predictions and expert agreement");
    eval->add_option("--manifest", eval_opt.manifest_path, "Manifest JSON path");
    eval->add_option("--out", eval_opt.out_dir, "Output directory");
    eval->add_option("--config", eval_config, "JSON config with the flags below");
    eval->add_option("--threshold", eval_opt.metric.lesion_threshold_ml,
                     "Lesion threshold [ml]");
    eval->add_option("--hd-percentile", eval_opt.metric.hd_percentile,
                     "Hausdorff percentile q");
    eval->add_option("--epsilon", eval_opt.metric.epsilon, "VS epsilon");
    eval->add_option("--sdt-tolerance", eval_opt.metric.sdt_tolerances,
                     "Surface-dice tolerances [mm]");
    eval->add_option("--threads", eval_opt.threads, "Worker threads");

    mrseg::cli::StatsOptions stats_opt;
    stats_opt.seed = default_seed();
    auto* stats = app.add_subcommand("stats", "Statistical comparison of metric reports");
    stats->add_option("--a", stats_opt.report_a, "Primary metric report CSV")->required();
    stats->add_option("--b", stats_opt.report_b, "Secondary metric report CSV");
    stats->add_option("--plan", stats_opt.plan_path, "Comparison plan JSON")->required();
    stats->add_option("--out", stats_opt.out_dir, "Output directory")->required();
    stats->add_option("--r", stats_opt.bootstrap_r, "Bootstrap replicates");
    stats->add_option("--ci-level", stats_opt.ci_level, "CI level");
    stats->add_option("--seed", stats_opt.seed, "RNG seed");

    mrseg::cli::SimulateOptions sim_opt;
    sim_opt.seed = default_seed();
    auto* simulate =
        app.add_subcommand("simulate", "Compare mean vs majority-vote estimators");
    simulate->add_option("--p", sim_opt.p, "True Bernoulli probability")->required();
    simulate->add_option("--experts", sim_opt.experts, "Number of experts")->required();
    simulate->add_option("--mode", sim_opt.mode, "exact | mc");
    simulate->add_option("--trials", sim_opt.trials, "Monte Carlo trials");
    simulate->add_option("--seed", sim_opt.seed, "RNG seed (mc mode)");
    simulate->add_option("--csv", sim_opt.csv_out, "Optional CSV output path");

    mrseg::cli::PlotOptions plot_opt;
    auto* plot = app.add_subcommand("plot", "Render report columns as SVG + CSV");
    plot->add_option("--report", plot_opt.report_path, "Metric report CSV")->required();
    plot->add_option("--kind", plot_opt.kind, "bland-altman | scatter");
    plot->add_option("--x", plot_opt.x_col, "Column: comparison_id/metric")->required();
    plot->add_option("--y", plot_opt.y_col, "Column: comparison_id/metric")->required();
    plot->add_option("--out", plot_opt.out_svg, "Output SVG path")->required();
    plot->add_option("--ci-level", plot_opt.ci_level, "Limits-of-agreement level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : mrseg::cli::kUsage;
    }

    if (validate->parsed())
        return mrseg::cli::cmd_validate(manifest, std::cout, std::cerr);
    if (fuse->parsed()) return mrseg::cli::cmd_fuse(fuse_opt, std::cerr);
    if (eval->parsed()) {
        if (!eval_config.empty()) {
            // Config file values; explicit flags already parsed override nothing,
            // so the file is read first by hand when both are given.
            std::ifstream f(eval_config);
            if (!f) {
                std::cerr << "error: cannot open config: " << eval_config << "\n";
                return mrseg::cli::kUsage;
            }
            try {
                const auto doc = nlohmann::json::parse(f);
                if (doc.contains("manifest"))
                    eval_opt.manifest_path = doc.at("manifest").get<std::string>();
                if (doc.contains("out")) eval_opt.out_dir = doc.at("out").get<std::string>();
                if (doc.contains("threshold"))
                    eval_opt.metric.lesion_threshold_ml = doc.at("threshold").get<double>();
                if (doc.contains("hd_percentile"))
                    eval_opt.metric.hd_percentile = doc.at("hd_percentile").get<double>();
                if (doc.contains("epsilon"))
                    eval_opt.metric.epsilon = doc.at("epsilon").get<double>();
                if (doc.contains("sdt_tolerances"))
                    eval_opt.metric.sdt_tolerances =
                        doc.at("sdt_tolerances").get<std::vector<double>>();
            } catch (const nlohmann::json::exception& e) {
                std::cerr << "error: bad config: " << e.what() << "\n";
                return mrseg::cli::kUsage;
            }
        }
        if (eval_opt.manifest_path.empty() || eval_opt.out_dir.empty()) {
            std::cerr << "error: eval requires --manifest and --out (or a --config)\n";
            return mrseg::cli::kUsage;
        }
        return mrseg::cli::cmd_eval(eval_opt, std::cerr);
    }
    if (stats->parsed()) return mrseg::cli::cmd_stats(stats_opt, std::cerr);
    if (simulate->parsed())
        return mrseg::cli::cmd_simulate(sim_opt, std::cout, std::cerr);
    if (plot->parsed()) return mrseg::cli::cmd_plot(plot_opt, std::cerr);
    return mrseg::cli::kUsage;
}
