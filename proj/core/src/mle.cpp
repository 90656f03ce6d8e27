#include "mrseg/mle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace mrseg {

namespace {

double clamp_prob(double p) {
    return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

// Majority vote over n binary labels as a scalar estimate; ties vote 0.
double majority_scalar(std::size_t ones, std::size_t n) {
    return 2 * ones > n ? 1.0 : 0.0;
}

}  // namespace

double bernoulli_mle(const LabelSample& s) {
    if (s.labels.empty()) throw ArgumentError("empty label sample");
    std::size_t ones = 0;
    for (int k : s.labels) ones += std::size_t(k != 0);
    return double(ones) / double(s.labels.size());
}

double log_likelihood(const std::vector<double>& p, const std::vector<int>& k) {
    if (p.size() != k.size()) throw ArgumentError("p and k differ in length");
    double ll = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = clamp_prob(p[i]);
        ll += k[i] ? std::log(pi) : std::log1p(-pi);
    }
    return ll;
}

bool mle_maximizes_likelihood_check(const LabelSample& s, double grid_step) {
    if (!(grid_step > 0.0 && grid_step < 0.5))
        throw ArgumentError("grid_step must be in (0, 0.5)");
    const double target = bernoulli_mle(s);
    double best_p = grid_step, best_ll = -std::numeric_limits<double>::infinity();
    for (double p = grid_step; p < 1.0; p += grid_step) {
        const std::vector<double> pv(s.labels.size(), p);
        const double ll = log_likelihood(pv, s.labels);
        if (ll > best_ll) {
            best_ll = ll;
            best_p = p;
        }
    }
    return std::abs(best_p - target) <= grid_step;
}

EstimatorComparison enumerate_expert_comparison(double true_p, std::size_t n_experts) {
    if (!(true_p >= 0.0 && true_p <= 1.0)) throw ArgumentError("true_p outside [0,1]");
    if (n_experts < 1) throw ArgumentError("need at least one expert");
    if (n_experts > 20)
        throw ArgumentError("enumeration limited to 20 experts; use the Monte Carlo variant");

    EstimatorComparison out;
    out.n_experts = n_experts;
    out.true_p = true_p;

    const std::size_t n = n_experts;
    for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << n); ++bits) {
        const auto ones = std::size_t(std::popcount(bits));
        const double mass = std::pow(true_p, double(ones)) *
                            std::pow(1.0 - true_p, double(n - ones));
        if (mass == 0.0) continue;
        const double mle_err = std::abs(double(ones) / double(n) - true_p);
        const double maj_err = std::abs(majority_scalar(ones, n) - true_p);
        out.mle_expected_error += mass * mle_err;
        out.majority_expected_error += mass * maj_err;
        if (mle_err < maj_err) out.fraction_mle_strictly_better += mass;
    }
    return out;
}

EstimatorComparison simulate_expert_comparison(double true_p, std::size_t n_experts,
                                               std::size_t trials, const RngStream& rng) {
    if (!(true_p >= 0.0 && true_p <= 1.0)) throw ArgumentError("true_p outside [0,1]");
    if (n_experts < 1) throw ArgumentError("need at least one expert");
    if (trials < 1) throw ArgumentError("need at least one trial");

    EstimatorComparison out;
    out.n_experts = n_experts;
    out.true_p = true_p;

    for (std::size_t t = 0; t < trials; ++t) {
        const RngStream sub = rng.substream(t);
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n_experts; ++i)
            ones += std::size_t(sub.uniform(i) < true_p);
        const double mle_err = std::abs(double(ones) / double(n_experts) - true_p);
        const double maj_err = std::abs(majority_scalar(ones, n_experts) - true_p);
        out.mle_expected_error += mle_err;
        out.majority_expected_error += maj_err;
        if (mle_err < maj_err) out.fraction_mle_strictly_better += 1.0;
    }
    out.mle_expected_error /= double(trials);
    out.majority_expected_error /= double(trials);
    out.fraction_mle_strictly_better /= double(trials);
    return out;
}

RecoveryError simulate_probability_map_recovery(const ProbabilityGrid& latent,
                                                std::size_t n_experts,
                                                const RngStream& rng) {
    if (n_experts < 1) throw ArgumentError("need at least one expert");
    const std::size_t n = latent.data().size();
    RecoveryError out;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = double(latent.data()[i]);
        const RngStream voxel = rng.substream(i);
        std::size_t ones = 0;
        for (std::size_t e = 0; e < n_experts; ++e)
            ones += std::size_t(voxel.uniform(e) < p);
        out.mean_map_mae += std::abs(double(ones) / double(n_experts) - p);
        out.majority_map_mae += std::abs(majority_scalar(ones, n_experts) - p);
    }
    out.mean_map_mae /= double(n);
    out.majority_map_mae /= double(n);
    return out;
}

}  // namespace mrseg
