#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mrseg/distance_transform.hpp"
#include "mrseg/grid.hpp"

namespace mrseg {

struct MetricConfig {
    double epsilon = 1e-9;                    // epsilon in the VS denominator
    double hd_percentile = 95.0;              // q, in (0,100]
    std::vector<double> sdt_tolerances = {2.0, 5.0};  // mm
    double lesion_threshold_ml = 1.0;
};

// Voxelwise 2x2 tally of a prediction against a reference.
struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
};

ConfusionCounts confusion_counts(const VoxelMask& pred, const VoxelMask& ref);

// Ratio metrics return nullopt on 0/0; aggregation skips undefined values.
std::optional<double> dice(const ConfusionCounts& c);
std::optional<double> precision(const ConfusionCounts& c);
std::optional<double> recall(const ConfusionCounts& c);

double volumetric_similarity(const VoxelMask& pred, const VoxelMask& ref,
                             const MetricConfig& cfg);
double absolute_volume_difference_ml(const VoxelMask& pred, const VoxelMask& ref);

// Symmetric surface-distance metrics; undefined when either mask is empty.
std::optional<double> hausdorff_percentile(const VoxelMask& pred, const VoxelMask& ref,
                                           const MetricConfig& cfg);
std::optional<double> average_surface_distance(const VoxelMask& pred,
                                               const VoxelMask& ref);
std::optional<double> surface_dice_at_tolerance(const VoxelMask& pred,
                                                const VoxelMask& ref, double tolerance_mm);

struct SegmentationScores {
    double vs = 0.0;
    double avd_ml = 0.0;
    std::optional<double> dice, precision, recall;
    std::optional<double> asd_mm, hd_mm;
    std::vector<std::pair<double, std::optional<double>>> sdt;  // (tolerance mm, value)
};

SegmentationScores score_case(const VoxelMask& pred, const VoxelMask& ref,
                              const MetricConfig& cfg);

// Image-level classification of per-case volumes at the lesion threshold.
struct ImageLevelScores {
    double ccr = 0.0;
    std::optional<double> sensitivity, specificity, f_score, auc;
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

ImageLevelScores image_level_scores(const std::vector<std::pair<double, double>>& pred_ref_ml,
                                    const MetricConfig& cfg);

// Rank-based (Mann-Whitney) AUC of a continuous score against binary labels,
// with tie midranks. Undefined when only one class is present.
std::optional<double> rank_auc(const std::vector<double>& scores,
                               const std::vector<int>& labels);

enum class VolumeBin : int { B1 = 1, B2 = 2, B3 = 3, B4 = 4 };

// Half-open bins [0,1), [1,50), [50,100), [100,inf) ml.
VolumeBin volume_bin(double volume_ml);

}  // namespace mrseg
