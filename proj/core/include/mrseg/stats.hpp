#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrseg/rng.hpp"

namespace mrseg {

enum class StatMethod {
    BootstrapMedian,
    WilcoxonOneSided,
    SignTest,
    VarianceRatio,
    Kappa,
    Spearman,
    FisherZ,
    ShapiroWilk,
};

struct StatResult {
    double estimate = 0.0;
    double ci_low = 0.0, ci_high = 0.0;
    double ci_level = 0.95;
    std::optional<double> p_raw;
    std::optional<double> p_adjusted;
    std::size_t n = 0;
    StatMethod method = StatMethod::BootstrapMedian;
};

double median(std::vector<double> xs);

// Percentile bootstrap CI of the sample median; deterministic given rng.
StatResult bootstrap_median_ci(const std::vector<double>& xs, std::size_t R,
                               double level, const RngStream& rng);

// One-sided Wilcoxon signed-rank test of H1: median(x - y) > margin.
// Zero differences are dropped; tied |d| get midranks. Exact enumeration
// for effective n <= 25, otherwise normal approximation with tie-corrected
// variance and continuity correction. All differences zero -> p = 1.
double wilcoxon_signed_rank_one_sided(const std::vector<double>& x,
                                      const std::vector<double>& y,
                                      double margin = 0.0);

// Two-sided one-sample sign test of H0: median(d) = 0 (exact binomial).
double sign_test_two_sided(const std::vector<double>& diffs);

// Step-down Holm adjustment; result in input order, capped at 1.
std::vector<double> holm_bonferroni(const std::vector<double>& p);

struct VarianceRatio {
    double ratio = 0.0;            // var(y) / var(x)
    double bootstrap_sd = 0.0;     // SD of replicate ratios
    double p_one_sided = 0.0;      // fraction of replicate ratios <= 1
    std::size_t replicates_used = 0;
};

// Paired bootstrap of the variance ratio var(y)/var(x). Undefined
// (nullopt) when the denominator variance is zero.
std::optional<VarianceRatio> variance_ratio(const std::vector<double>& x,
                                            const std::vector<double>& y,
                                            std::size_t R, const RngStream& rng);

struct BlandAltman {
    double mean_diff = 0.0;              // bias, mean(x - y)
    double loa_low = 0.0, loa_high = 0.0;
    std::vector<std::pair<double, double>> points;  // (mean, diff) per pair
};

BlandAltman bland_altman(const std::vector<double>& x, const std::vector<double>& y,
                         double level = 0.95);

// Chance-corrected agreement of two raters; nullopt when expected
// agreement is 1 (single category).
std::optional<double> cohen_kappa(const std::vector<int>& a, const std::vector<int>& b);

// Fleiss' kappa over items x raters category assignments.
std::optional<double> fleiss_kappa(const std::vector<std::vector<int>>& ratings);

struct Correlation {
    double rho = 0.0;
    double p = 1.0;  // two-sided
};

// Spearman rank correlation with midranks; exact permutation p for n <= 8,
// t-approximation otherwise. Nullopt when either variable has zero rank
// variance.
std::optional<Correlation> spearman(const std::vector<double>& x,
                                    const std::vector<double>& y);

// Fisher's z-test for the difference of two correlation coefficients.
struct FisherZ {
    double z = 0.0;
    double p = 1.0;  // two-sided
};
FisherZ fisher_z_test(double r1, std::size_t n1, double r2, std::size_t n2);

struct ShapiroWilk {
    double w = 0.0;
    double p = 1.0;
};

// Royston's approximation, 3 <= n <= 5000; nullopt for a constant sample.
std::optional<ShapiroWilk> shapiro_wilk(const std::vector<double>& xs);

struct MedianRange {
    double median = 0.0;
    double range = 0.0;  // max - min of defined values
    std::size_t n_defined = 0;
};

// Median (and range) across experts for one case and metric; undefined
// entries are skipped, all-undefined yields nullopt.
std::optional<MedianRange> aggregate_expert_median(
    const std::map<std::string, std::optional<double>>& per_expert);

}  // namespace mrseg
