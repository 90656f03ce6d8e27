#include "mrseg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mrseg/distributions.hpp"
#include "mrseg/errors.hpp"

namespace mrseg {

namespace {

double sample_variance(const std::vector<double>& xs) {
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
    double ss = 0.0;
    for (double v : xs) ss += (v - mean) * (v - mean);
    return ss / double(xs.size() - 1);
}

// Midranks of |values|; ties share the mean of their rank block.
std::vector<double> midranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double mid = 0.5 * double(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mid;
        i = j;
    }
    return ranks;
}

std::size_t percentile_index(double q, std::size_t n) {
    auto rank = std::size_t(std::ceil(q * double(n)));
    return std::clamp<std::size_t>(rank, 1, n) - 1;
}

}  // namespace

double median(std::vector<double> xs) {
    if (xs.empty()) throw ArgumentError("median of empty sample");
    const std::size_t n = xs.size();
    std::nth_element(xs.begin(), xs.begin() + std::ptrdiff_t(n / 2), xs.end());
    const double hi = xs[n / 2];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(xs.begin(), xs.begin() + std::ptrdiff_t(n / 2));
    return 0.5 * (lo + hi);
}

StatResult bootstrap_median_ci(const std::vector<double>& xs, std::size_t R,
                               double level, const RngStream& rng) {
    if (xs.empty()) throw ArgumentError("bootstrap of empty sample");
    if (R < 1) throw ArgumentError("R must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw ArgumentError("level must be in (0,1)");

    const std::size_t n = xs.size();
    std::vector<double> reps(R);
    std::vector<double> resample(n);
    for (std::size_t r = 0; r < R; ++r) {
        const RngStream sub = rng.substream(r);
        for (std::size_t i = 0; i < n; ++i) resample[i] = xs[sub.below(i, n)];
        reps[r] = median(resample);
    }
    std::sort(reps.begin(), reps.end());

    const double alpha = 1.0 - level;
    StatResult res;
    res.estimate = median(xs);
    res.ci_low = reps[percentile_index(alpha / 2.0, R)];
    res.ci_high = reps[percentile_index(1.0 - alpha / 2.0, R)];
    res.ci_level = level;
    res.n = n;
    res.method = StatMethod::BootstrapMedian;
    return res;
}

double wilcoxon_signed_rank_one_sided(const std::vector<double>& x,
                                      const std::vector<double>& y,
                                      double margin) {
    if (x.size() != y.size()) throw ArgumentError("paired samples differ in length");
    if (x.empty()) throw ArgumentError("empty samples");

    std::vector<double> d, absd;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double di = x[i] - y[i] - margin;
        if (di != 0.0) {
            d.push_back(di);
            absd.push_back(std::abs(di));
        }
    }
    const std::size_t n = d.size();
    if (n == 0) return 1.0;  // no signal either way

    const std::vector<double> ranks = midranks(absd);
    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0.0) w_plus += ranks[i];

    if (n <= 25) {
        // Exact null distribution over doubled midranks (integers).
        std::vector<long> r2(n);
        long total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            r2[i] = std::lround(2.0 * ranks[i]);
            total += r2[i];
        }
        std::vector<std::uint64_t> count(std::size_t(total) + 1, 0);
        count[0] = 1;
        for (long r : r2)
            for (long s = total; s >= r; --s)
                count[std::size_t(s)] += count[std::size_t(s - r)];
        const long w2 = std::lround(2.0 * w_plus);
        std::uint64_t tail = 0;
        for (long s = w2; s <= total; ++s) tail += count[std::size_t(s)];
        return double(tail) / std::ldexp(1.0, int(n));
    }

    // Normal approximation with tie correction and continuity correction.
    const double nn = double(n);
    double tie_term = 0.0;
    {
        std::vector<double> sorted = absd;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && sorted[j] == sorted[i]) ++j;
            const double t = double(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
    }
    const double mu = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = (w_plus - mu - 0.5) / std::sqrt(var);
    return 1.0 - norm_cdf(z);
}

double sign_test_two_sided(const std::vector<double>& diffs) {
    std::size_t pos = 0, n = 0;
    for (double d : diffs) {
        if (d == 0.0) continue;
        ++n;
        if (d > 0.0) ++pos;
    }
    if (n == 0) return 1.0;
    const std::size_t k = std::max(pos, n - pos);
    // P(X >= k) for X ~ Bin(n, 1/2), doubled and capped.
    double tail = 0.0;
    double logc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        if (i >= k) tail += std::exp(logc - double(n) * std::log(2.0));
        logc += std::log(double(n - i)) - std::log(double(i + 1));
    }
    return std::min(1.0, 2.0 * tail);
}

std::vector<double> holm_bonferroni(const std::vector<double>& p) {
    const std::size_t m = p.size();
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("p-value outside [0,1]");

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

    std::vector<double> adjusted(m);
    double running = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double scaled = p[order[i]] * double(m - i);
        running = std::max(running, scaled);
        adjusted[order[i]] = std::min(1.0, running);
    }
    return adjusted;
}

std::optional<VarianceRatio> variance_ratio(const std::vector<double>& x,
                                            const std::vector<double>& y,
                                            std::size_t R, const RngStream& rng) {
    if (x.size() != y.size()) throw ArgumentError("paired samples differ in length");
    if (x.size() < 2) throw ArgumentError("need at least 2 pairs");

    const double vx = sample_variance(x);
    if (vx == 0.0) return std::nullopt;

    VarianceRatio out;
    out.ratio = sample_variance(y) / vx;

    const std::size_t n = x.size();
    std::vector<double> rx(n), ry(n), ratios;
    for (std::size_t r = 0; r < R; ++r) {
        const RngStream sub = rng.substream(r);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = sub.below(i, n);
            rx[i] = x[j];
            ry[i] = y[j];
        }
        const double rvx = sample_variance(rx);
        if (rvx == 0.0) continue;
        ratios.push_back(sample_variance(ry) / rvx);
    }
    out.replicates_used = ratios.size();
    if (!ratios.empty()) {
        const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) /
                            double(ratios.size());
        double ss = 0.0;
        std::size_t le_one = 0;
        for (double v : ratios) {
            ss += (v - mean) * (v - mean);
            if (v <= 1.0) ++le_one;
        }
        out.bootstrap_sd = ratios.size() > 1 ? std::sqrt(ss / double(ratios.size() - 1)) : 0.0;
        out.p_one_sided = double(le_one) / double(ratios.size());
    }
    return out;
}

BlandAltman bland_altman(const std::vector<double>& x, const std::vector<double>& y,
                         double level) {
    if (x.size() != y.size()) throw ArgumentError("paired samples differ in length");
    if (x.size() < 2) throw ArgumentError("need at least 2 pairs");

    BlandAltman out;
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        d[i] = x[i] - y[i];
        out.points.emplace_back(0.5 * (x[i] + y[i]), d[i]);
    }
    out.mean_diff = std::accumulate(d.begin(), d.end(), 0.0) / double(d.size());
    const double sd = std::sqrt(sample_variance(d));
    const double z = norm_ppf(1.0 - (1.0 - level) / 2.0);
    out.loa_low = out.mean_diff - z * sd;
    out.loa_high = out.mean_diff + z * sd;
    return out;
}

std::optional<double> cohen_kappa(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw ArgumentError("paired ratings differ in length");
    if (a.empty()) throw ArgumentError("empty ratings");

    std::map<int, double> ma, mb;
    double agree = 0.0;
    const double n = double(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma[a[i]] += 1.0;
        mb[b[i]] += 1.0;
        if (a[i] == b[i]) agree += 1.0;
    }
    const double po = agree / n;
    double pe = 0.0;
    for (const auto& [cat, ca] : ma) {
        auto it = mb.find(cat);
        if (it != mb.end()) pe += (ca / n) * (it->second / n);
    }
    if (pe >= 1.0) return std::nullopt;
    return (po - pe) / (1.0 - pe);
}

std::optional<double> fleiss_kappa(const std::vector<std::vector<int>>& ratings) {
    if (ratings.empty()) throw ArgumentError("no items");
    const std::size_t n_raters = ratings[0].size();
    if (n_raters < 2) throw ArgumentError("need at least 2 raters");
    for (const auto& row : ratings)
        if (row.size() != n_raters) throw ArgumentError("ragged ratings matrix");

    std::map<int, double> totals;
    double p_bar = 0.0;
    const double n = double(n_raters);
    for (const auto& row : ratings) {
        std::map<int, double> counts;
        for (int c : row) counts[c] += 1.0;
        double agree = 0.0;
        for (const auto& [cat, cnt] : counts) {
            agree += cnt * (cnt - 1.0);
            totals[cat] += cnt;
        }
        p_bar += agree / (n * (n - 1.0));
    }
    p_bar /= double(ratings.size());
    double pe = 0.0;
    const double total = n * double(ratings.size());
    for (const auto& [cat, cnt] : totals) pe += (cnt / total) * (cnt / total);
    if (pe >= 1.0) return std::nullopt;
    return (p_bar - pe) / (1.0 - pe);
}

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

std::optional<Correlation> spearman(const std::vector<double>& x,
                                    const std::vector<double>& y) {
    if (x.size() != y.size()) throw ArgumentError("paired samples differ in length");
    const std::size_t n = x.size();
    if (n < 3) throw ArgumentError("need at least 3 pairs");

    const std::vector<double> rx = midranks(x);
    const std::vector<double> ry = midranks(y);
    const auto constant = [](const std::vector<double>& r) {
        return std::all_of(r.begin(), r.end(), [&](double v) { return v == r[0]; });
    };
    if (constant(rx) || constant(ry)) return std::nullopt;

    Correlation out;
    out.rho = pearson(rx, ry);

    if (n <= 8) {
        // Exact permutation distribution of |rho|.
        std::vector<double> perm = ry;
        std::sort(perm.begin(), perm.end());
        std::size_t at_least = 0, count = 0;
        const double target = std::abs(out.rho) - 1e-12;
        do {
            ++count;
            if (std::abs(pearson(rx, perm)) >= target) ++at_least;
        } while (std::next_permutation(perm.begin(), perm.end()));
        out.p = double(at_least) / double(count);
    } else {
        const double r2 = std::min(out.rho * out.rho, 1.0 - 1e-15);
        const double t = out.rho * std::sqrt((double(n) - 2.0) / (1.0 - r2));
        out.p = 2.0 * t_sf(std::abs(t), double(n) - 2.0);
    }
    return out;
}

FisherZ fisher_z_test(double r1, std::size_t n1, double r2, std::size_t n2) {
    if (!(std::abs(r1) < 1.0 && std::abs(r2) < 1.0))
        throw ArgumentError("correlations must satisfy |r| < 1");
    if (n1 <= 3 || n2 <= 3) throw ArgumentError("need n > 3 per sample");
    FisherZ out;
    out.z = (std::atanh(r1) - std::atanh(r2)) /
            std::sqrt(1.0 / double(n1 - 3) + 1.0 / double(n2 - 3));
    out.p = 2.0 * (1.0 - norm_cdf(std::abs(out.z)));
    return out;
}

std::optional<ShapiroWilk> shapiro_wilk(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 3 || n > 5000) throw ArgumentError("Shapiro-Wilk requires 3 <= n <= 5000");

    std::vector<double> x = xs;
    std::sort(x.begin(), x.end());
    if (x.front() == x.back()) return std::nullopt;  // constant sample

    // Expected normal order statistics (Blom scores).
    std::vector<double> m(n);
    double ssq_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = norm_ppf((double(i + 1) - 0.375) / (double(n) + 0.25));
        ssq_m += m[i] * m[i];
    }

    std::vector<double> a(n);
    const double u = 1.0 / std::sqrt(double(n));
    if (n == 3) {
        a[0] = -std::sqrt(0.5);
        a[1] = 0.0;
        a[2] = std::sqrt(0.5);
    } else {
        const double cn = m[n - 1] / std::sqrt(ssq_m);
        const double an = cn + u * (0.221157 + u * (-0.147981 + u * (-2.071190 +
                          u * (4.434685 + u * -2.706056))));
        if (n <= 5) {
            const double phi = (ssq_m - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * an * an);
            for (std::size_t i = 1; i + 1 < n; ++i) a[i] = m[i] / std::sqrt(phi);
            a[n - 1] = an;
            a[0] = -an;
        } else {
            const double cn1 = m[n - 2] / std::sqrt(ssq_m);
            const double an1 = cn1 + u * (0.042981 + u * (-0.293762 + u * (-1.752461 +
                               u * (5.682633 + u * -3.582633))));
            const double phi = (ssq_m - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
                               (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
            for (std::size_t i = 2; i + 2 < n; ++i) a[i] = m[i] / std::sqrt(phi);
            a[n - 1] = an;
            a[0] = -an;
            a[n - 2] = an1;
            a[1] = -an1;
        }
    }

    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += a[i] * x[i];
        den += (x[i] - mean) * (x[i] - mean);
    }
    ShapiroWilk out;
    out.w = num * num / den;

    // Royston's p-value approximation.
    if (n == 3) {
        const double pi6 = 6.0 / M_PI;
        out.p = std::clamp(pi6 * (std::asin(std::sqrt(out.w)) - std::asin(std::sqrt(0.75))),
                           0.0, 1.0);
    } else if (n <= 11) {
        const double nn = double(n);
        const double g = -2.273 + 0.459 * nn;
        const double w = -std::log(g - std::log1p(-out.w));
        const double mu = 0.5440 - 0.39978 * nn + 0.025054 * nn * nn - 0.0006714 * nn * nn * nn;
        const double sigma = std::exp(1.3822 - 0.77857 * nn + 0.062767 * nn * nn -
                                      0.0020322 * nn * nn * nn);
        out.p = 1.0 - norm_cdf((w - mu) / sigma);
    } else {
        const double ln = std::log(double(n));
        const double w = std::log1p(-out.w);
        const double mu = -1.5861 - 0.31082 * ln - 0.083751 * ln * ln + 0.0038915 * ln * ln * ln;
        const double sigma = std::exp(-0.4803 - 0.082676 * ln + 0.0030302 * ln * ln);
        out.p = 1.0 - norm_cdf((w - mu) / sigma);
    }
    return out;
}

std::optional<MedianRange> aggregate_expert_median(
    const std::map<std::string, std::optional<double>>& per_expert) {
    std::vector<double> defined;
    for (const auto& [id, v] : per_expert)
        if (v) defined.push_back(*v);
    if (defined.empty()) return std::nullopt;
    MedianRange out;
    out.median = median(defined);
    const auto [lo, hi] = std::minmax_element(defined.begin(), defined.end());
    out.range = *hi - *lo;
    out.n_defined = defined.size();
    return out;
}

}  // namespace mrseg
