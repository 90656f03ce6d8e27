#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mrseg/grid.hpp"
#include "mrseg/manifest.hpp"

namespace mrseg {

enum class FusionKind { MajorityVote, RandomExpert, MeanProbability, SingleExpert };

struct FusionScheme {
    FusionKind kind = FusionKind::MajorityVote;
    std::uint64_t seed = 0;    // RandomExpert only
    std::string expert_id;     // SingleExpert only
};

// Per-voxel vote: 1 iff the sum of expert labels is strictly greater than
// half the number of experts. Ties (even expert counts) vote 0.
VoxelMask majority_vote(std::span<const VoxelMask> masks);

// Per-voxel arithmetic mean of expert labels; values in {0, 1/n, ..., 1}.
ProbabilityGrid mean_probability_map(std::span<const VoxelMask> masks);

// Picks one expert uniformly. The choice is a pure function of
// (seed, case_id, epoch), so it is reproducible and independent of
// iteration or thread order. Default epoch 0 keeps the draw stable
// per case; pass an epoch index to redraw each epoch.
std::string pick_random_expert(const CaseRecord& c, std::uint64_t seed,
                               std::uint64_t epoch = 0);

struct SampledExpert {
    VoxelMask mask;
    std::string expert_id;
};

// pick_random_expert plus loading the chosen mask from the manifest.
SampledExpert random_expert_sample(const Manifest& m, const CaseRecord& c,
                                   const FusionScheme& scheme,
                                   std::uint64_t epoch = 0);

}  // namespace mrseg
