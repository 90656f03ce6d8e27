#include "mrseg/fusion.hpp"

#include "mrseg/mask_io.hpp"
#include "mrseg/rng.hpp"

namespace mrseg {

namespace {

void require_same_geometry(std::span<const VoxelMask> masks) {
    if (masks.empty()) throw ArgumentError("no masks to fuse");
    for (std::size_t i = 1; i < masks.size(); ++i)
        if (!masks[i].same_geometry(masks[0]))
            throw ShapeError("fusion inputs disagree on dims/spacing");
}

std::vector<std::uint32_t> vote_sums(std::span<const VoxelMask> masks) {
    std::vector<std::uint32_t> sums(masks[0].data().size(), 0);
    for (const auto& m : masks)
        for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += m.data()[i];
    return sums;
}

}  // namespace

VoxelMask majority_vote(std::span<const VoxelMask> masks) {
    require_same_geometry(masks);
    const auto sums = vote_sums(masks);
    const std::uint32_t n = std::uint32_t(masks.size());
    std::vector<std::uint8_t> out(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i)
        out[i] = 2 * sums[i] > n ? 1 : 0;  // strictly greater than n/2
    return VoxelMask(masks[0].dims(), masks[0].spacing(), std::move(out));
}

ProbabilityGrid mean_probability_map(std::span<const VoxelMask> masks) {
    require_same_geometry(masks);
    const auto sums = vote_sums(masks);
    const float n = float(masks.size());
    std::vector<float> out(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) out[i] = float(sums[i]) / n;
    return ProbabilityGrid(masks[0].dims(), masks[0].spacing(), std::move(out));
}

std::string pick_random_expert(const CaseRecord& c, std::uint64_t seed,
                               std::uint64_t epoch) {
    if (c.expert_masks.empty())
        throw ArgumentError("case " + c.case_id + " has no expert masks");
    RngStream stream(seed, c.case_id);
    const std::uint64_t idx = stream.below(epoch, c.expert_masks.size());
    auto it = c.expert_masks.begin();
    std::advance(it, std::ptrdiff_t(idx));
    return it->first;
}

SampledExpert random_expert_sample(const Manifest& m, const CaseRecord& c,
                                   const FusionScheme& scheme,
                                   std::uint64_t epoch) {
    const std::string id = pick_random_expert(c, scheme.seed, epoch);
    return {load_binary_mask(m.resolve(c.expert_masks.at(id))), id};
}

}  // namespace mrseg
