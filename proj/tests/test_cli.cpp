#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../tools/commands.hpp"
#include "mrseg/mask_io.hpp"
#include "mrseg/report.hpp"

using namespace mrseg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::size_t count_substrings(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}

// A box-shaped mask inside an 8x8x4 grid with 5 mm cubic voxels, so each
// voxel is 0.125 ml. Extents are half-open.
VoxelMask box_mask(std::uint32_t x0, std::uint32_t x1, std::uint32_t y0,
                   std::uint32_t y1, std::uint32_t z0, std::uint32_t z1) {
    const Dims dims{8, 8, 4};
    std::vector<std::uint8_t> data(dims.count(), 0);
    for (std::uint32_t z = z0; z < z1; ++z)
        for (std::uint32_t y = y0; y < y1; ++y)
            for (std::uint32_t x = x0; x < x1; ++x)
                data[(std::size_t(z) * dims.ny + y) * dims.nx + x] = 1;
    return VoxelMask(dims, Spacing{5, 5, 5}, std::move(data));
}

// Three experts, one model, four cases; case c4 is below the 1 ml
// reference threshold. Returns the manifest path.
fs::path write_fixture(const fs::path& dir) {
    fs::create_directories(dir / "masks");
    json cases = json::array();
    for (int c = 1; c <= 4; ++c) {
        const std::string id = "c" + std::to_string(c);
        json expert_masks = json::object();
        json prediction_masks = json::object();
        if (c < 4) {
            // boxes of 24..36 voxels (3.0 .. 4.5 ml), jittered per expert
            const std::uint32_t cx = std::uint32_t(c);
            save_mask(box_mask(1, 1 + 3, 1, 1 + 4, 0, 2),
                      dir / "masks" / (id + "_A.mrsg"));
            save_mask(box_mask(1, 1 + 3, 1, 1 + 4 + cx % 2, 0, 2),
                      dir / "masks" / (id + "_B.mrsg"));
            save_mask(box_mask(1, 1 + 3 + cx % 2, 1, 1 + 4, 0, 3),
                      dir / "masks" / (id + "_C.mrsg"));
            save_mask(box_mask(1, 1 + 3, 1, 1 + 3, 0, 2),
                      dir / "masks" / (id + "_m1.mrsg"));
        } else {
            // 2 voxels = 0.25 ml: below threshold
            save_mask(box_mask(0, 2, 0, 1, 0, 1), dir / "masks" / (id + "_A.mrsg"));
            save_mask(box_mask(0, 2, 0, 1, 0, 1), dir / "masks" / (id + "_B.mrsg"));
            save_mask(box_mask(0, 0, 0, 0, 0, 0), dir / "masks" / (id + "_C.mrsg"));
            save_mask(box_mask(0, 1, 0, 1, 0, 1), dir / "masks" / (id + "_m1.mrsg"));
        }
        for (const char* e : {"A", "B", "C"})
            expert_masks[e] = "masks/" + id + "_" + e + ".mrsg";
        prediction_masks["m1"] = "masks/" + id + "_m1.mrsg";
        cases.push_back({{"case_id", id},
                         {"expert_masks", expert_masks},
                         {"prediction_masks", prediction_masks},
                         {"covariates", {{"age", 60.0 + c}, {"score", double(c % 3)}}}});
    }
    const json manifest = {{"expert_ids", {"A", "B", "C"}}, {"cases", cases}};
    const fs::path path = dir / "manifest.json";
    std::ofstream f(path);
    f << manifest.dump(2);
    return path;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("validate command") {
    TempDir tmp("mrseg-cli-validate");
    const fs::path manifest = write_fixture(tmp.path);
    std::ostringstream out, err;

    SUBCASE("clean manifest exits 0 with no output") {
        CHECK(cli::cmd_validate(manifest, out, err) == cli::kOk);
        CHECK(out.str().empty());
    }
    SUBCASE("missing mask file exits 1 and names the case") {
        fs::remove(tmp.path / "masks" / "c2_B.mrsg");
        CHECK(cli::cmd_validate(manifest, out, err) == cli::kDiagnostics);
        CHECK(out.str().find("c2") != std::string::npos);
        CHECK(out.str().find("missing file") != std::string::npos);
    }
    SUBCASE("nonexistent manifest exits 2") {
        CHECK(cli::cmd_validate(tmp.path / "nope.json", out, err) == cli::kUsage);
        CHECK(err.str().find("error:") != std::string::npos);
    }
    SUBCASE("invalid JSON exits 2") {
        std::ofstream(tmp.path / "bad.json") << "{not json";
        CHECK(cli::cmd_validate(tmp.path / "bad.json", out, err) == cli::kUsage);
    }
}

TEST_CASE("fuse command") {
    TempDir tmp("mrseg-cli-fuse");
    const fs::path manifest = write_fixture(tmp.path);
    std::ostringstream err;

    SUBCASE("majority outputs one mask per case plus a log") {
        cli::FuseOptions opt{manifest, tmp.path / "fused", "majority", 0, 1};
        REQUIRE(cli::cmd_fuse(opt, err) == cli::kOk);
        for (const char* id : {"c1", "c2", "c3", "c4"})
            CHECK(fs::exists(tmp.path / "fused" / (std::string(id) + ".mrsg")));
        const std::string log = slurp(tmp.path / "fused" / "fusion_log.csv");
        CHECK(log.rfind("case_id,scheme,chosen\n", 0) == 0);
        CHECK(count_substrings(log, ",majority,majority") == 4);
    }
    SUBCASE("outputs are byte-identical across reruns and thread counts") {
        for (const std::string scheme : {"majority", "mean", "random"}) {
            cli::FuseOptions a{manifest, tmp.path / "f1", scheme, 7, 1};
            cli::FuseOptions b{manifest, tmp.path / "f2", scheme, 7, 8};
            REQUIRE(cli::cmd_fuse(a, err) == cli::kOk);
            REQUIRE(cli::cmd_fuse(b, err) == cli::kOk);
            for (const char* id : {"c1", "c2", "c3", "c4"}) {
                const std::string name = std::string(id) + ".mrsg";
                CHECK(slurp(tmp.path / "f1" / name) == slurp(tmp.path / "f2" / name));
            }
            CHECK(slurp(tmp.path / "f1" / "fusion_log.csv") ==
                  slurp(tmp.path / "f2" / "fusion_log.csv"));
        }
    }
    SUBCASE("random scheme picks an enrolled expert per case") {
        cli::FuseOptions opt{manifest, tmp.path / "rnd", "random", 3, 1};
        REQUIRE(cli::cmd_fuse(opt, err) == cli::kOk);
        std::ifstream log(tmp.path / "rnd" / "fusion_log.csv");
        std::string line;
        std::getline(log, line);  // header
        int rows = 0;
        while (std::getline(log, line)) {
            ++rows;
            const std::string chosen = line.substr(line.rfind(',') + 1);
            CHECK((chosen == "A" || chosen == "B" || chosen == "C"));
            // the copied file matches that expert's committed mask
            const std::string case_id = line.substr(0, line.find(','));
            CHECK(slurp(tmp.path / "rnd" / (case_id + ".mrsg")) ==
                  slurp(tmp.path / "masks" / (case_id + "_" + chosen + ".mrsg")));
        }
        CHECK(rows == 4);
    }
    SUBCASE("expert scheme copies that expert") {
        cli::FuseOptions opt{manifest, tmp.path / "ea", "expert:A", 0, 1};
        REQUIRE(cli::cmd_fuse(opt, err) == cli::kOk);
        CHECK(slurp(tmp.path / "ea" / "c1.mrsg") ==
              slurp(tmp.path / "masks" / "c1_A.mrsg"));
    }
    SUBCASE("unknown scheme and unknown expert exit 2") {
        cli::FuseOptions bad{manifest, tmp.path / "x", "average", 0, 1};
        CHECK(cli::cmd_fuse(bad, err) == cli::kUsage);
        cli::FuseOptions ghost{manifest, tmp.path / "x", "expert:Z", 0, 1};
        CHECK(cli::cmd_fuse(ghost, err) == cli::kUsage);
    }
    SUBCASE("unreadable mask exits 1 naming the case") {
        fs::remove(tmp.path / "masks" / "c3_A.mrsg");
        cli::FuseOptions opt{manifest, tmp.path / "part", "majority", 0, 1};
        CHECK(cli::cmd_fuse(opt, err) == cli::kDiagnostics);
        CHECK(err.str().find("c3") != std::string::npos);
        // other cases still fused
        CHECK(fs::exists(tmp.path / "part" / "c1.mrsg"));
    }
}

TEST_CASE("eval command") {
    TempDir tmp("mrseg-cli-eval");
    const fs::path manifest = write_fixture(tmp.path);
    std::ostringstream err;
    cli::EvalOptions opt;
    opt.manifest_path = manifest;
    opt.out_dir = tmp.path / "eval";
    REQUIRE(cli::cmd_eval(opt, err) == cli::kOk);

    const MetricReport rep = read_metric_csv(tmp.path / "eval" / "metrics.csv");

    SUBCASE("volume rows exist for every case and rater") {
        for (const std::string cmp :
             {"expert:A", "expert:B", "expert:C", "expert-median", "majority", "model:m1"})
            CHECK(rep.series(cmp, "volume_ml").size() == 4);
    }
    SUBCASE("segmentation rows are restricted to above-threshold cases") {
        const auto dice = rep.series("model:m1|expert:A", "dice");
        CHECK(dice.size() == 3);
        CHECK_FALSE(dice.count("c4"));
        CHECK(rep.series("expert:A|expert:B", "dice").size() == 3);
        CHECK(rep.series("interexpert-median", "dice").size() == 3);
        CHECK(rep.series("model:m1|expert-median", "dice:range").size() == 3);
    }
    SUBCASE("spot-check a hand-computable value") {
        // c1: expert A box 3x4x2 = 24 voxels at 0.125 ml
        const auto vols = rep.series("expert:A", "volume_ml");
        CHECK(vols.at("c1") == doctest::Approx(3.0).epsilon(1e-12));
        // model m1 (3x3x2) is a subset of expert A (3x4x2): precision 1
        CHECK(rep.series("model:m1|expert:A", "precision").at("c1") == 1.0);
        CHECK(rep.series("model:m1|expert:A", "recall").at("c1") ==
              doctest::Approx(18.0 / 24).epsilon(1e-12));
    }
    SUBCASE("covariates and cohort rows present") {
        CHECK(rep.series("covariate", "age").at("c2") == 62.0);
        const auto auc = rep.series("model:m1|expert-median", "auc");
        REQUIRE(auc.count("ALL"));
        CHECK(auc.at("ALL") >= 0.0);
        CHECK(rep.series("model:m1|expert-median", "ccr").count("ALL"));
    }
    SUBCASE("csv and json agree on row count") {
        const std::string csv = slurp(tmp.path / "eval" / "metrics.csv");
        const json j = json::parse(slurp(tmp.path / "eval" / "metrics.json"));
        CHECK(std::size_t(std::count(csv.begin(), csv.end(), '\n')) == j.size() + 1);
    }
    SUBCASE("threaded run is byte-identical") {
        cli::EvalOptions par = opt;
        par.out_dir = tmp.path / "eval8";
        par.threads = 8;
        REQUIRE(cli::cmd_eval(par, err) == cli::kOk);
        CHECK(slurp(tmp.path / "eval" / "metrics.csv") ==
              slurp(tmp.path / "eval8" / "metrics.csv"));
    }
}

TEST_CASE("stats command") {
    TempDir tmp("mrseg-cli-stats");
    const fs::path manifest = write_fixture(tmp.path);
    std::ostringstream err;
    cli::EvalOptions eval;
    eval.manifest_path = manifest;
    eval.out_dir = tmp.path / "eval";
    REQUIRE(cli::cmd_eval(eval, err) == cli::kOk);

    const json plan = {
        {"bootstrap_r", 200},
        {"seed", 11},
        {"median_ci", {{{"comparison", "model:m1|expert-median"}, {"metric", "dice"}}}},
        {"wilcoxon",
         {{{"a", {{"comparison", "model:m1|expert-median"}, {"metric", "dice"}}},
           {"b", {{"comparison", "model:m1|expert-median"}, {"metric", "dice"}}},
           {"name", "self"}}}},
        {"variance_ratio",
         {{{"x", {{"comparison", "expert:A"}, {"metric", "volume_ml"}}},
           {"y", {{"comparison", "expert:A"}, {"metric", "volume_ml"}}},
           {"name", "self_ratio"}}}},
        {"bland_altman",
         {{{"x", {{"comparison", "model:m1"}, {"metric", "volume_ml"}}},
           {"y", {{"comparison", "model:m1"}, {"metric", "volume_ml"}}},
           {"name", "self_ba"}}}},
        {"spearman",
         {{{"x", {{"comparison", "expert:A"}, {"metric", "volume_ml"}}},
           {"y", {{"comparison", "expert:A"}, {"metric", "volume_ml"}}},
           {"name", "self_corr"}}}},
        {"shapiro_wilk", {{{"comparison", "expert:A"}, {"metric", "volume_ml"}}}},
    };
    std::ofstream(tmp.path / "plan.json") << plan.dump(2);

    cli::StatsOptions opt;
    opt.report_a = tmp.path / "eval" / "metrics.csv";
    opt.plan_path = tmp.path / "plan.json";
    opt.out_dir = tmp.path / "stats";
    REQUIRE(cli::cmd_stats(opt, err) == cli::kOk);

    const json rows = json::parse(slurp(tmp.path / "stats" / "stats.json"));
    REQUIRE(rows.is_array());

    auto find_row = [&](const std::string& method) -> json {
        for (const auto& r : rows)
            if (r.at("method") == method) return r;
        REQUIRE(false);
        return {};
    };

    SUBCASE("self comparisons behave as identities") {
        const json w = find_row("wilcoxon_one_sided");
        CHECK(w.at("p_raw").get<double>() == 1.0);
        CHECK(w.at("estimate").get<double>() == 0.0);
        CHECK(find_row("variance_ratio").at("estimate").get<double>() == 1.0);
        const json ba = find_row("bland_altman");
        CHECK(ba.at("estimate").get<double>() == 0.0);
        CHECK(ba.at("ci_low").get<double>() == 0.0);
        CHECK(find_row("spearman").at("estimate").get<double>() ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("median CI covers the estimate") {
        const json m = find_row("bootstrap_median");
        CHECK(m.at("ci_low").get<double>() <= m.at("estimate").get<double>());
        CHECK(m.at("estimate").get<double>() <= m.at("ci_high").get<double>());
        CHECK(m.at("n").get<int>() == 3);  // c4 excluded below threshold
    }
    SUBCASE("holm column never drops below raw") {
        for (const auto& r : rows)
            if (!r.at("p_raw").is_null())
                CHECK(r.at("p_holm").get<double>() >= r.at("p_raw").get<double>());
    }
    SUBCASE("csv mirrors the json rows") {
        const std::string csv = slurp(tmp.path / "stats" / "stats.csv");
        CHECK(csv.rfind("comparison,metric,estimate,ci_low,ci_high,p_raw,p_holm,n,method",
                        0) == 0);
        CHECK(std::size_t(std::count(csv.begin(), csv.end(), '\n')) == rows.size() + 1);
    }
    SUBCASE("reruns are byte-identical") {
        cli::StatsOptions again = opt;
        again.out_dir = tmp.path / "stats2";
        REQUIRE(cli::cmd_stats(again, err) == cli::kOk);
        CHECK(slurp(tmp.path / "stats" / "stats.csv") ==
              slurp(tmp.path / "stats2" / "stats.csv"));
    }
    SUBCASE("unpaired selectors exit 1, malformed plan exits 2") {
        std::ofstream(tmp.path / "bad_pair.json")
            << json{{"wilcoxon",
                     {{{"a", {{"comparison", "model:m1|expert-median"}, {"metric", "dice"}}},
                       {"b", {{"comparison", "expert:A"}, {"metric", "volume_ml"}}}}}}}
                   .dump();
        cli::StatsOptions bad = opt;
        bad.plan_path = tmp.path / "bad_pair.json";
        bad.out_dir = tmp.path / "statsbad";
        CHECK(cli::cmd_stats(bad, err) == cli::kDiagnostics);

        std::ofstream(tmp.path / "broken.json") << "{oops";
        bad.plan_path = tmp.path / "broken.json";
        CHECK(cli::cmd_stats(bad, err) == cli::kUsage);
    }
}

TEST_CASE("simulate command") {
    std::ostringstream out, err;
    cli::SimulateOptions opt;
    opt.p = 0.5;
    opt.experts = 3;
    opt.mode = "exact";
    REQUIRE(cli::cmd_simulate(opt, out, err) == cli::kOk);
    CHECK(out.str().find("mle_expected_error            0.25\n") != std::string::npos);
    CHECK(out.str().find("majority_expected_error       0.5\n") != std::string::npos);
    CHECK(out.str().find("fraction_mle_strictly_better  0.75\n") != std::string::npos);

    TempDir tmp("mrseg-cli-simulate");
    opt.csv_out = tmp.path / "sim.csv";
    REQUIRE(cli::cmd_simulate(opt, out, err) == cli::kOk);
    CHECK(slurp(opt.csv_out).find("3,0.5,0.25,0.5,0.75") != std::string::npos);

    cli::SimulateOptions bad;
    bad.mode = "mc";  // missing --trials
    CHECK(cli::cmd_simulate(bad, out, err) == cli::kUsage);
    bad.mode = "nope";
    CHECK(cli::cmd_simulate(bad, out, err) == cli::kUsage);
}

TEST_CASE("plot command") {
    TempDir tmp("mrseg-cli-plot");
    const fs::path manifest = write_fixture(tmp.path);
    std::ostringstream err;
    cli::EvalOptions eval;
    eval.manifest_path = manifest;
    eval.out_dir = tmp.path / "eval";
    REQUIRE(cli::cmd_eval(eval, err) == cli::kOk);

    cli::PlotOptions opt;
    opt.report_path = tmp.path / "eval" / "metrics.csv";
    opt.kind = "bland-altman";
    opt.x_col = "model:m1/volume_ml";
    opt.y_col = "expert-median/volume_ml";
    opt.out_svg = tmp.path / "ba.svg";

    SUBCASE("bland-altman svg structure and sidecar csv") {
        REQUIRE(cli::cmd_plot(opt, err) == cli::kOk);
        const std::string svg = slurp(opt.out_svg);
        CHECK(svg.rfind("<svg xmlns", 0) == 0);
        CHECK(count_substrings(svg, "class=\"hline\"") == 3);
        CHECK(count_substrings(svg, "class=\"point\"") == 4);
        CHECK(count_substrings(svg, "stroke-dasharray") == 2);
        const std::string csv = slurp(tmp.path / "ba.csv");
        CHECK(csv.rfind("case_id,mean,diff\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    }
    SUBCASE("scatter svg has a unity line and one point per case") {
        opt.kind = "scatter";
        opt.out_svg = tmp.path / "sc.svg";
        REQUIRE(cli::cmd_plot(opt, err) == cli::kOk);
        const std::string svg = slurp(opt.out_svg);
        CHECK(count_substrings(svg, "class=\"unity\"") == 1);
        CHECK(count_substrings(svg, "class=\"point\"") == 4);
        CHECK(slurp(tmp.path / "sc.csv").rfind("case_id,x,y\n", 0) == 0);
    }
    SUBCASE("reruns are byte-identical") {
        REQUIRE(cli::cmd_plot(opt, err) == cli::kOk);
        const std::string first = slurp(opt.out_svg);
        REQUIRE(cli::cmd_plot(opt, err) == cli::kOk);
        CHECK(slurp(opt.out_svg) == first);
    }
    SUBCASE("bad column spec exits 1, missing report exits 2") {
        cli::PlotOptions bad = opt;
        bad.x_col = "no-slash";
        CHECK(cli::cmd_plot(bad, err) == cli::kDiagnostics);
        bad = opt;
        bad.x_col = "ghost/metric";
        CHECK(cli::cmd_plot(bad, err) == cli::kDiagnostics);
        bad = opt;
        bad.report_path = tmp.path / "missing.csv";
        CHECK(cli::cmd_plot(bad, err) == cli::kUsage);
    }
}
