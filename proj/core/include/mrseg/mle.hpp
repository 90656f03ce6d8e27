#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mrseg/grid.hpp"
#include "mrseg/rng.hpp"

namespace mrseg {

// One voxel's worth of binary expert draws, with the generating
// probability when known (simulation).
struct LabelSample {
    std::vector<int> labels;            // each 0 or 1
    std::optional<double> true_p;
};

// Sample mean: the maximum-likelihood estimate of a Bernoulli parameter.
double bernoulli_mle(const LabelSample& s);

// Sum of k_i*log(p_i) + (1-k_i)*log(1-p_i); equals negative cross-entropy.
// Probabilities are clamped to [1e-12, 1-1e-12] inside the logs.
double log_likelihood(const std::vector<double>& p, const std::vector<int>& k);

// Grid search check that the constant-p likelihood peaks at mean(labels).
bool mle_maximizes_likelihood_check(const LabelSample& s, double grid_step);

struct EstimatorComparison {
    std::size_t n_experts = 0;
    double true_p = 0.0;
    double mle_expected_error = 0.0;
    double majority_expected_error = 0.0;
    double fraction_mle_strictly_better = 0.0;
};

// Exhaustive enumeration of all 2^n expert-label vectors: compares the
// mean estimate against the scalarized majority vote (ties -> 0) by
// absolute error to true_p, weighting by Bernoulli probability mass.
EstimatorComparison enumerate_expert_comparison(double true_p, std::size_t n_experts);

// Monte Carlo variant for larger expert counts.
EstimatorComparison simulate_expert_comparison(double true_p, std::size_t n_experts,
                                               std::size_t trials, const RngStream& rng);

struct RecoveryError {
    double mean_map_mae = 0.0;
    double majority_map_mae = 0.0;
};

// Samples n_experts binary masks voxel-wise from a latent probability map
// and measures how well the mean map and the majority-vote map recover it.
RecoveryError simulate_probability_map_recovery(const ProbabilityGrid& latent,
                                                std::size_t n_experts,
                                                const RngStream& rng);

}  // namespace mrseg
