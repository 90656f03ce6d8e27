#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mrseg/fusion.hpp"
#include "mrseg/manifest.hpp"
#include "mrseg/mask_io.hpp"
#include "mrseg/mle.hpp"
#include "mrseg/parallel.hpp"
#include "mrseg/report.hpp"
#include "mrseg/stats.hpp"

namespace mrseg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int cmd_validate(const fs::path& manifest_path, std::ostream& out, std::ostream& err) {
    Manifest m;
    try {
        m = load_manifest(manifest_path);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    const auto diagnostics = validate_manifest(m);
    for (const auto& d : diagnostics) out << d.case_id << ": " << d.message << "\n";
    return diagnostics.empty() ? kOk : kDiagnostics;
}

// ---------------------------------------------------------------------------
// fuse

int cmd_fuse(const FuseOptions& opt, std::ostream& err) {
    Manifest m;
    try {
        m = load_manifest(opt.manifest_path);
        fs::create_directories(opt.out_dir);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    const bool is_expert = opt.scheme.rfind("expert:", 0) == 0;
    if (opt.scheme != "majority" && opt.scheme != "random" && opt.scheme != "mean" &&
        !is_expert) {
        err << "error: unknown scheme: " << opt.scheme << "\n";
        return kUsage;
    }
    if (is_expert) {
        const std::string id = opt.scheme.substr(7);
        if (std::find(m.expert_ids.begin(), m.expert_ids.end(), id) == m.expert_ids.end()) {
            err << "error: unknown expert id: " << id << "\n";
            return kUsage;
        }
    }

    struct CaseResult {
        std::string chosen;
        std::string error;
    };
    std::vector<CaseResult> results(m.cases.size());

    parallel_for(m.cases.size(), opt.threads, [&](std::size_t i) {
        const CaseRecord& c = m.cases[i];
        CaseResult& res = results[i];
        try {
            std::vector<VoxelMask> masks;
            for (const auto& [id, p] : c.expert_masks)
                masks.push_back(load_binary_mask(m.resolve(p)));
            const fs::path out = opt.out_dir / (c.case_id + ".mrsg");
            if (opt.scheme == "majority") {
                save_mask(majority_vote(masks), out);
                res.chosen = "majority";
            } else if (opt.scheme == "mean") {
                save_mask(mean_probability_map(masks), out);
                res.chosen = "mean";
            } else if (opt.scheme == "random") {
                FusionScheme scheme{FusionKind::RandomExpert, opt.seed, {}};
                auto [mask, id] = random_expert_sample(m, c, scheme);
                save_mask(mask, out);
                res.chosen = id;
            } else {
                const std::string id = opt.scheme.substr(7);
                auto it = c.expert_masks.find(id);
                if (it == c.expert_masks.end())
                    throw ArgumentError("case " + c.case_id + " lacks expert " + id);
                save_mask(load_binary_mask(m.resolve(it->second)), out);
                res.chosen = id;
            }
        } catch (const Error& e) {
            res.error = e.what();
        }
    });

    std::ofstream log(opt.out_dir / "fusion_log.csv", std::ios::trunc);
    log << "case_id,scheme,chosen\n";
    bool failed = false;
    for (std::size_t i = 0; i < m.cases.size(); ++i) {
        if (!results[i].error.empty()) {
            err << m.cases[i].case_id << ": " << results[i].error << "\n";
            failed = true;
            continue;
        }
        log << m.cases[i].case_id << ',' << opt.scheme << ',' << results[i].chosen << '\n';
    }
    return failed ? kDiagnostics : kOk;
}

// ---------------------------------------------------------------------------
// eval

namespace {

std::vector<std::pair<std::string, std::optional<double>>> named_scores(
    const SegmentationScores& s) {
    std::vector<std::pair<std::string, std::optional<double>>> out = {
        {"vs", s.vs},           {"avd_ml", s.avd_ml}, {"dice", s.dice},
        {"precision", s.precision}, {"recall", s.recall}, {"asd_mm", s.asd_mm},
        {"hd_mm", s.hd_mm},
    };
    for (const auto& [t, v] : s.sdt)
        out.emplace_back("sdt@" + format_number(t) + "mm", v);
    return out;
}

// Median (and range) across one case's per-expert score lists.
void add_aggregated(MetricReport& rep, const std::string& case_id,
                    const std::string& comparison,
                    const std::map<std::string, std::map<std::string, std::optional<double>>>&
                        per_metric_per_expert) {
    for (const auto& [metric, per_expert] : per_metric_per_expert) {
        const auto agg = aggregate_expert_median(per_expert);
        if (agg) {
            rep.add(case_id, comparison, metric, agg->median);
            rep.add(case_id, comparison, metric + ":range", agg->range);
        } else {
            rep.add(case_id, comparison, metric, std::nullopt);
            rep.add(case_id, comparison, metric + ":range", std::nullopt);
        }
    }
}

}  // namespace

int cmd_eval(const EvalOptions& opt, std::ostream& err) {
    Manifest m;
    try {
        m = load_manifest(opt.manifest_path);
        fs::create_directories(opt.out_dir);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    struct CaseOut {
        MetricReport rows;
        std::map<std::string, double> model_volume;  // model -> ml
        double expert_median_volume = 0.0;
        std::string error;
    };
    std::vector<CaseOut> outs(m.cases.size());

    parallel_for(m.cases.size(), opt.threads, [&](std::size_t ci) {
        const CaseRecord& c = m.cases[ci];
        CaseOut& out = outs[ci];
        try {
            std::map<std::string, VoxelMask> experts, models;
            for (const auto& [id, p] : c.expert_masks)
                experts.emplace(id, load_binary_mask(m.resolve(p)));
            for (const auto& [id, p] : c.prediction_masks)
                models.emplace(id, load_binary_mask(m.resolve(p)));

            std::vector<double> expert_vols;
            std::vector<VoxelMask> expert_list;
            for (const auto& [id, mask] : experts) {
                const double v = volume_ml(mask);
                expert_vols.push_back(v);
                expert_list.push_back(mask);
                out.rows.add(c.case_id, "expert:" + id, "volume_ml", v);
                out.rows.add(c.case_id, "expert:" + id, "volume_bin",
                             double(int(volume_bin(v))));
            }
            const double med_vol = median(expert_vols);
            out.expert_median_volume = med_vol;
            out.rows.add(c.case_id, "expert-median", "volume_ml", med_vol);
            out.rows.add(c.case_id, "expert-median", "volume_bin",
                         double(int(volume_bin(med_vol))));

            const VoxelMask majority = majority_vote(expert_list);
            const double maj_vol = volume_ml(majority);
            out.rows.add(c.case_id, "majority", "volume_ml", maj_vol);
            out.rows.add(c.case_id, "majority", "volume_bin",
                         double(int(volume_bin(maj_vol))));

            for (const auto& [id, mask] : models) {
                const double v = volume_ml(mask);
                out.model_volume[id] = v;
                out.rows.add(c.case_id, "model:" + id, "volume_ml", v);
                out.rows.add(c.case_id, "model:" + id, "volume_bin",
                             double(int(volume_bin(v))));
            }

            for (const auto& [name, v] : c.covariates)
                out.rows.add(c.case_id, "covariate", name, v);

            // Segmentation rows only for cases above the reference threshold.
            if (!(med_vol > opt.metric.lesion_threshold_ml)) return;

            // Inter-expert pairwise, plus the per-case median across pairs.
            std::map<std::string, std::map<std::string, std::optional<double>>> inter_agg;
            for (auto a = experts.begin(); a != experts.end(); ++a)
                for (auto b = std::next(a); b != experts.end(); ++b) {
                    const std::string cmp = "expert:" + a->first + "|expert:" + b->first;
                    const auto scores =
                        score_case(a->second, b->second, opt.metric);
                    for (const auto& [name, v] : named_scores(scores)) {
                        out.rows.add(c.case_id, cmp, name, v);
                        inter_agg[name][cmp] = v;
                    }
                }
            add_aggregated(out.rows, c.case_id, "interexpert-median", inter_agg);

            for (const auto& [model_id, pred] : models) {
                std::map<std::string, std::map<std::string, std::optional<double>>> agg;
                for (const auto& [expert_id, ref] : experts) {
                    const std::string cmp =
                        "model:" + model_id + "|expert:" + expert_id;
                    const auto scores = score_case(pred, ref, opt.metric);
                    for (const auto& [name, v] : named_scores(scores)) {
                        out.rows.add(c.case_id, cmp, name, v);
                        agg[name][expert_id] = v;
                    }
                }
                add_aggregated(out.rows, c.case_id,
                               "model:" + model_id + "|expert-median", agg);
            }
        } catch (const Error& e) {
            out.error = e.what();
        }
    });

    MetricReport report;
    bool failed = false;
    std::map<std::string, std::vector<std::pair<double, double>>> image_level;
    for (std::size_t i = 0; i < m.cases.size(); ++i) {
        if (!outs[i].error.empty()) {
            err << m.cases[i].case_id << ": " << outs[i].error << "\n";
            failed = true;
            continue;
        }
        for (auto& row : outs[i].rows.rows) report.rows.push_back(std::move(row));
        for (const auto& [model, v] : outs[i].model_volume)
            image_level[model].emplace_back(v, outs[i].expert_median_volume);
    }

    // Cohort-level classification of model volumes against the expert median.
    for (const auto& [model, cases] : image_level) {
        const auto s = image_level_scores(cases, opt.metric);
        const std::string cmp = "model:" + model + "|expert-median";
        report.add("ALL", cmp, "ccr", s.ccr);
        report.add("ALL", cmp, "sensitivity", s.sensitivity);
        report.add("ALL", cmp, "specificity", s.specificity);
        report.add("ALL", cmp, "f_score", s.f_score);
        report.add("ALL", cmp, "auc", s.auc);
    }

    report.sort();
    try {
        write_metric_csv(report, opt.out_dir / "metrics.csv");
        write_metric_json(report, opt.out_dir / "metrics.json");
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return failed ? kDiagnostics : kOk;
}

// ---------------------------------------------------------------------------
// stats

namespace {

struct Selector {
    std::string report = "a";
    std::string comparison;
    std::string metric;

    std::string label() const { return report + ":" + comparison + "/" + metric; }
};

Selector parse_selector(const json& j) {
    Selector s;
    if (j.contains("report")) s.report = j.at("report").get<std::string>();
    s.comparison = j.at("comparison").get<std::string>();
    s.metric = j.at("metric").get<std::string>();
    return s;
}

// Per-case series of a selector; the cohort-level "ALL" row is not a case.
std::map<std::string, double> resolve(const MetricReport& a, const MetricReport& b,
                                      const Selector& s) {
    const MetricReport& rep = s.report == "b" ? b : a;
    auto series = rep.series(s.comparison, s.metric);
    series.erase("ALL");
    return series;
}

// Paired case alignment; throws naming the unpaired ids.
std::pair<std::vector<double>, std::vector<double>> align(
    const std::map<std::string, double>& x, const std::map<std::string, double>& y,
    const std::string& what) {
    std::vector<std::string> missing;
    for (const auto& [id, v] : x)
        if (!y.count(id)) missing.push_back(id);
    for (const auto& [id, v] : y)
        if (!x.count(id)) missing.push_back(id);
    if (!missing.empty()) {
        std::string msg = "unpaired cases in " + what + ":";
        for (const auto& id : missing) msg += " " + id;
        throw ArgumentError(msg);
    }
    std::vector<double> xs, ys;
    for (const auto& [id, v] : x) {
        xs.push_back(v);
        ys.push_back(y.at(id));
    }
    return {xs, ys};
}

struct StatRow {
    std::string comparison;
    std::string metric;
    std::optional<double> estimate;
    std::optional<double> ci_low, ci_high;
    std::optional<double> p_raw, p_holm;
    std::size_t n = 0;
    std::string method;
};

std::string cell(const std::optional<double>& v) {
    return v ? format_number(*v) : "NA";
}

}  // namespace

int cmd_stats(const StatsOptions& opt, std::ostream& err) {
    MetricReport a, b;
    json plan;
    try {
        a = read_metric_csv(opt.report_a);
        if (!opt.report_b.empty()) b = read_metric_csv(opt.report_b);
        std::ifstream pf(opt.plan_path);
        if (!pf) throw IoError("cannot open plan: " + opt.plan_path.string());
        plan = json::parse(pf);
        fs::create_directories(opt.out_dir);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        err << "error: plan is not valid JSON: " << e.what() << "\n";
        return kUsage;
    }

    const std::size_t R = plan.value("bootstrap_r", opt.bootstrap_r);
    const double level = plan.value("ci_level", opt.ci_level);
    const std::uint64_t seed = plan.value("seed", opt.seed);

    std::vector<StatRow> rows;
    try {
        for (const auto& j : plan.value("median_ci", json::array())) {
            const Selector s = parse_selector(j);
            const auto series = resolve(a, b, s);
            StatRow row{s.report + ":" + s.comparison, s.metric, {}, {}, {}, {}, {},
                        series.size(), "bootstrap_median"};
            if (!series.empty()) {
                std::vector<double> xs;
                for (const auto& [id, v] : series) xs.push_back(v);
                const RngStream rng(seed, "median_ci/" + s.label());
                const StatResult res = bootstrap_median_ci(xs, R, level, rng);
                row.estimate = res.estimate;
                row.ci_low = res.ci_low;
                row.ci_high = res.ci_high;
            }
            rows.push_back(std::move(row));
        }

        for (const auto& j : plan.value("wilcoxon", json::array())) {
            const Selector sx = parse_selector(j.at("a"));
            const Selector sy = parse_selector(j.at("b"));
            const double margin = j.value("margin", 0.0);
            const std::string name =
                j.value("name", sx.label() + ">" + sy.label());
            const auto [xs, ys] =
                align(resolve(a, b, sx), resolve(a, b, sy), name);
            StatRow row{name, sx.metric, {}, {}, {}, {}, {}, xs.size(),
                        "wilcoxon_one_sided"};
            row.p_raw = wilcoxon_signed_rank_one_sided(xs, ys, margin);
            row.estimate = median(xs) - median(ys);
            rows.push_back(std::move(row));
        }

        for (const auto& j : plan.value("variance_ratio", json::array())) {
            const Selector sx = parse_selector(j.at("x"));
            const Selector sy = parse_selector(j.at("y"));
            const std::string name = j.value("name", sy.label() + "/" + sx.label());
            const auto [xs, ys] = align(resolve(a, b, sx), resolve(a, b, sy), name);
            StatRow row{name, sx.metric, {}, {}, {}, {}, {}, xs.size(), "variance_ratio"};
            const RngStream rng(seed, "variance_ratio/" + name);
            if (const auto vr = variance_ratio(xs, ys, R, rng)) {
                row.estimate = vr->ratio;
                row.ci_low = vr->ratio - vr->bootstrap_sd;
                row.ci_high = vr->ratio + vr->bootstrap_sd;
                row.p_raw = vr->p_one_sided;
            }
            rows.push_back(std::move(row));
        }

        for (const auto& j : plan.value("bland_altman", json::array())) {
            const Selector sx = parse_selector(j.at("x"));
            const Selector sy = parse_selector(j.at("y"));
            const std::string name = j.value("name", sx.label() + "-" + sy.label());
            const auto [xs, ys] = align(resolve(a, b, sx), resolve(a, b, sy), name);
            const BlandAltman ba = bland_altman(xs, ys, level);
            StatRow row{name, sx.metric, ba.mean_diff, ba.loa_low, ba.loa_high,
                        {}, {}, xs.size(), "bland_altman"};
            rows.push_back(std::move(row));
        }

        for (const auto& j : plan.value("cohen_kappa", json::array())) {
            const Selector sx = parse_selector(j.at("a"));
            const Selector sy = parse_selector(j.at("b"));
            const std::string name = j.value("name", sx.label() + "~" + sy.label());
            const auto [xs, ys] = align(resolve(a, b, sx), resolve(a, b, sy), name);
            std::vector<int> ax(xs.size()), bx(ys.size());
            std::transform(xs.begin(), xs.end(), ax.begin(),
                           [](double v) { return int(std::lround(v)); });
            std::transform(ys.begin(), ys.end(), bx.begin(),
                           [](double v) { return int(std::lround(v)); });
            StatRow row{name, sx.metric, cohen_kappa(ax, bx), {}, {}, {}, {},
                        xs.size(), "cohen_kappa"};
            rows.push_back(std::move(row));
        }

        for (const auto& j : plan.value("fleiss_kappa", json::array())) {
            const std::string name = j.at("name").get<std::string>();
            std::vector<std::map<std::string, double>> cols;
            std::string metric;
            for (const auto& jc : j.at("columns")) {
                const Selector s = parse_selector(jc);
                metric = s.metric;
                cols.push_back(resolve(a, b, s));
            }
            if (cols.size() < 2) throw ArgumentError("fleiss_kappa needs >= 2 columns");
            std::vector<std::vector<int>> ratings;
            for (const auto& [id, v0] : cols[0]) {
                std::vector<int> row_ratings{int(std::lround(v0))};
                bool complete = true;
                for (std::size_t ci = 1; ci < cols.size(); ++ci) {
                    auto it = cols[ci].find(id);
                    if (it == cols[ci].end()) {
                        complete = false;
                        break;
                    }
                    row_ratings.push_back(int(std::lround(it->second)));
                }
                if (complete) ratings.push_back(std::move(row_ratings));
            }
            StatRow row{name, metric, fleiss_kappa(ratings), {}, {}, {}, {},
                        ratings.size(), "fleiss_kappa"};
            rows.push_back(std::move(row));
        }

        std::map<std::string, std::pair<double, std::size_t>> correlations;
        for (const auto& j : plan.value("spearman", json::array())) {
            const Selector sx = parse_selector(j.at("x"));
            const Selector sy = parse_selector(j.at("y"));
            const std::string name = j.value("name", sx.label() + "~" + sy.label());
            const auto [xs, ys] = align(resolve(a, b, sx), resolve(a, b, sy), name);
            StatRow row{name, sy.metric, {}, {}, {}, {}, {}, xs.size(), "spearman"};
            if (const auto c = spearman(xs, ys)) {
                row.estimate = c->rho;
                row.p_raw = c->p;
                correlations[name] = {c->rho, xs.size()};
            }
            rows.push_back(std::move(row));
        }

        for (const auto& j : plan.value("fisher_z", json::array())) {
            const std::string first = j.at("first").get<std::string>();
            const std::string second = j.at("second").get<std::string>();
            const std::string name = j.value("name", first + " vs " + second);
            auto itf = correlations.find(first);
            auto its = correlations.find(second);
            if (itf == correlations.end() || its == correlations.end())
                throw ArgumentError("fisher_z references unknown spearman entry in " + name);
            const FisherZ fz = fisher_z_test(itf->second.first, itf->second.second,
                                             its->second.first, its->second.second);
            StatRow row{name, "correlation", fz.z, {}, {}, fz.p, {},
                        itf->second.second + its->second.second, "fisher_z"};
            rows.push_back(std::move(row));
        }

        for (const auto& j : plan.value("shapiro_wilk", json::array())) {
            const Selector s = parse_selector(j);
            const auto series = resolve(a, b, s);
            std::vector<double> xs;
            for (const auto& [id, v] : series) xs.push_back(v);
            StatRow row{s.report + ":" + s.comparison, s.metric, {}, {}, {}, {}, {},
                        xs.size(), "shapiro_wilk"};
            if (xs.size() >= 3) {
                if (const auto sw = shapiro_wilk(xs)) {
                    row.estimate = sw->w;
                    row.p_raw = sw->p;
                }
            }
            rows.push_back(std::move(row));
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kDiagnostics;
    } catch (const json::exception& e) {
        err << "error: malformed plan: " << e.what() << "\n";
        return kUsage;
    }

    // Holm adjustment across every raw p in the table.
    std::vector<double> raw;
    std::vector<std::size_t> raw_rows;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].p_raw) {
            raw.push_back(*rows[i].p_raw);
            raw_rows.push_back(i);
        }
    const auto adjusted = holm_bonferroni(raw);
    for (std::size_t i = 0; i < raw_rows.size(); ++i)
        rows[raw_rows[i]].p_holm = adjusted[i];

    std::ofstream csv(opt.out_dir / "stats.csv", std::ios::trunc);
    csv << "comparison,metric,estimate,ci_low,ci_high,p_raw,p_holm,n,method\n";
    json jout = json::array();
    for (const auto& r : rows) {
        csv << r.comparison << ',' << r.metric << ',' << cell(r.estimate) << ','
            << cell(r.ci_low) << ',' << cell(r.ci_high) << ',' << cell(r.p_raw) << ','
            << cell(r.p_holm) << ',' << r.n << ',' << r.method << '\n';
        json row{{"comparison", r.comparison}, {"metric", r.metric}, {"n", r.n},
                 {"method", r.method}};
        const auto put = [&row](const char* key, const std::optional<double>& v) {
            if (v)
                row[key] = *v;
            else
                row[key] = nullptr;
        };
        put("estimate", r.estimate);
        put("ci_low", r.ci_low);
        put("ci_high", r.ci_high);
        put("p_raw", r.p_raw);
        put("p_holm", r.p_holm);
        jout.push_back(std::move(row));
    }
    std::ofstream jf(opt.out_dir / "stats.json", std::ios::trunc);
    jf << jout.dump(2) << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    EstimatorComparison cmp;
    try {
        if (opt.mode == "exact") {
            cmp = enumerate_expert_comparison(opt.p, opt.experts);
        } else if (opt.mode == "mc") {
            if (opt.trials == 0) throw ArgumentError("mc mode requires --trials");
            cmp = simulate_expert_comparison(opt.p, opt.experts, opt.trials,
                                             RngStream(opt.seed, "simulate"));
        } else {
            throw ArgumentError("unknown mode: " + opt.mode);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    out << "n_experts                     " << cmp.n_experts << "\n"
        << "true_p                        " << format_number(cmp.true_p) << "\n"
        << "mle_expected_error            " << format_number(cmp.mle_expected_error) << "\n"
        << "majority_expected_error       " << format_number(cmp.majority_expected_error)
        << "\n"
        << "fraction_mle_strictly_better  "
        << format_number(cmp.fraction_mle_strictly_better) << "\n";

    if (!opt.csv_out.empty()) {
        std::ofstream f(opt.csv_out, std::ios::trunc);
        if (!f) {
            err << "error: cannot write " << opt.csv_out << "\n";
            return kUsage;
        }
        f << "n_experts,true_p,mle_expected_error,majority_expected_error,"
             "fraction_mle_strictly_better\n"
          << cmp.n_experts << ',' << format_number(cmp.true_p) << ','
          << format_number(cmp.mle_expected_error) << ','
          << format_number(cmp.majority_expected_error) << ','
          << format_number(cmp.fraction_mle_strictly_better) << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// plot

namespace {

struct Series {
    std::vector<std::string> ids;
    std::vector<double> x, y;
};

Series aligned_columns(const MetricReport& rep, const std::string& x_col,
                       const std::string& y_col) {
    const auto split = [](const std::string& col) {
        const auto slash = col.rfind('/');
        if (slash == std::string::npos)
            throw ArgumentError("column must be comparison_id/metric: " + col);
        return std::pair{col.substr(0, slash), col.substr(slash + 1)};
    };
    const auto [cx, mx] = split(x_col);
    const auto [cy, my] = split(y_col);
    auto sx = rep.series(cx, mx);
    auto sy = rep.series(cy, my);
    sx.erase("ALL");
    sy.erase("ALL");
    if (sx.empty() || sy.empty())
        throw ArgumentError("no data for requested columns");
    Series out;
    for (const auto& [id, v] : sx) {
        auto it = sy.find(id);
        if (it == sy.end()) continue;
        out.ids.push_back(id);
        out.x.push_back(v);
        out.y.push_back(it->second);
    }
    if (out.ids.empty()) throw ArgumentError("requested columns share no cases");
    return out;
}

struct Frame {
    double xmin, xmax, ymin, ymax;
    static constexpr double width = 640, height = 480, margin = 60;

    double px(double x) const {
        return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
    }
    double py(double y) const {
        return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
    }
};

Frame fit_frame(const std::vector<double>& xs, const std::vector<double>& ys) {
    Frame f{};
    const auto [x0, x1] = std::minmax_element(xs.begin(), xs.end());
    const auto [y0, y1] = std::minmax_element(ys.begin(), ys.end());
    f.xmin = *x0;
    f.xmax = *x1;
    f.ymin = *y0;
    f.ymax = *y1;
    const double xpad = f.xmax > f.xmin ? 0.05 * (f.xmax - f.xmin) : 1.0;
    const double ypad = f.ymax > f.ymin ? 0.05 * (f.ymax - f.ymin) : 1.0;
    f.xmin -= xpad;
    f.xmax += xpad;
    f.ymin -= ypad;
    f.ymax += ypad;
    return f;
}

}  // namespace

int cmd_plot(const PlotOptions& opt, std::ostream& err) {
    try {
        const MetricReport rep = read_metric_csv(opt.report_path);
        const Series s = aligned_columns(rep, opt.x_col, opt.y_col);

        std::ostringstream svg;
        std::ostringstream csv;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
               "viewBox=\"0 0 640 480\">\n";
        svg << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";

        if (opt.kind == "bland-altman") {
            const BlandAltman ba = bland_altman(s.x, s.y, opt.ci_level);
            std::vector<double> means, diffs;
            for (const auto& [mean, diff] : ba.points) {
                means.push_back(mean);
                diffs.push_back(diff);
            }
            std::vector<double> yext = diffs;
            yext.push_back(ba.loa_low);
            yext.push_back(ba.loa_high);
            yext.push_back(ba.mean_diff);
            const Frame f = fit_frame(means, yext);
            for (double line : {ba.loa_low, ba.mean_diff, ba.loa_high}) {
                const bool bias = line == ba.mean_diff;
                svg << "<line class=\"hline\" x1=\"" << format_number(f.px(f.xmin))
                    << "\" y1=\"" << format_number(f.py(line)) << "\" x2=\""
                    << format_number(f.px(f.xmax)) << "\" y2=\""
                    << format_number(f.py(line)) << "\" stroke=\""
                    << (bias ? "black" : "gray") << "\""
                    << (bias ? "" : " stroke-dasharray=\"6 3\"") << "/>\n";
            }
            for (std::size_t i = 0; i < means.size(); ++i)
                svg << "<circle class=\"point\" cx=\"" << format_number(f.px(means[i]))
                    << "\" cy=\"" << format_number(f.py(diffs[i]))
                    << "\" r=\"3\" fill=\"steelblue\"/>\n";
            csv << "case_id,mean,diff\n";
            for (std::size_t i = 0; i < s.ids.size(); ++i)
                csv << s.ids[i] << ',' << format_number(means[i]) << ','
                    << format_number(diffs[i]) << '\n';
        } else if (opt.kind == "scatter") {
            const Frame f = fit_frame(s.x, s.y);
            const double lo = std::max(f.xmin, f.ymin), hi = std::min(f.xmax, f.ymax);
            if (lo < hi)  // unity line where the ranges overlap
                svg << "<line class=\"unity\" x1=\"" << format_number(f.px(lo))
                    << "\" y1=\"" << format_number(f.py(lo)) << "\" x2=\""
                    << format_number(f.px(hi)) << "\" y2=\"" << format_number(f.py(hi))
                    << "\" stroke=\"gray\"/>\n";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << "<circle class=\"point\" cx=\"" << format_number(f.px(s.x[i]))
                    << "\" cy=\"" << format_number(f.py(s.y[i]))
                    << "\" r=\"3\" fill=\"steelblue\"/>\n";
            csv << "case_id,x,y\n";
            for (std::size_t i = 0; i < s.ids.size(); ++i)
                csv << s.ids[i] << ',' << format_number(s.x[i]) << ','
                    << format_number(s.y[i]) << '\n';
        } else {
            throw ArgumentError("unknown plot kind: " + opt.kind);
        }
        svg << "</svg>\n";

        std::ofstream sf(opt.out_svg, std::ios::trunc);
        if (!sf) throw IoError("cannot write " + opt.out_svg.string());
        sf << svg.str();
        fs::path csv_path = opt.out_svg;
        csv_path.replace_extension(".csv");
        std::ofstream cf(csv_path, std::ios::trunc);
        if (!cf) throw IoError("cannot write " + csv_path.string());
        cf << csv.str();
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return kDiagnostics;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kOk;
}

}  // namespace mrseg::cli
