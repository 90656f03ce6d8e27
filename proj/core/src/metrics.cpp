#include "mrseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mrseg {

namespace {

void require_same_geometry(const VoxelMask& a, const VoxelMask& b) {
    if (!a.same_geometry(b)) throw ShapeError("masks disagree on dims/spacing");
}

// Directed distances from each surface voxel of `from` to the nearest
// surface voxel of `to`.
std::vector<double> directed_surface_distances(const VoxelMask& from,
                                               const VoxelMask& to) {
    const DistanceField field = distance_transform(surface_mask(to));
    std::vector<double> out;
    for (const auto& v : surface_voxels(from).voxels)
        out.push_back(field.dist_mm[from.index(v[0], v[1], v[2])]);
    return out;
}

// Nearest-rank percentile of an unsorted sample, q in (0,100].
double nearest_rank_percentile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    std::size_t rank = std::size_t(std::ceil(q / 100.0 * double(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return xs[rank - 1];
}

}  // namespace

ConfusionCounts confusion_counts(const VoxelMask& pred, const VoxelMask& ref) {
    require_same_geometry(pred, ref);
    ConfusionCounts c;
    const auto& p = pred.data();
    const auto& r = ref.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] && r[i]) ++c.tp;
        else if (p[i]) ++c.fp;
        else if (r[i]) ++c.fn;
        else ++c.tn;
    }
    return c;
}

std::optional<double> dice(const ConfusionCounts& c) {
    const double den = double(2 * c.tp + c.fn + c.fp);
    if (den == 0.0) return std::nullopt;
    return 2.0 * double(c.tp) / den;
}

std::optional<double> precision(const ConfusionCounts& c) {
    if (c.tp + c.fp == 0) return std::nullopt;
    return double(c.tp) / double(c.tp + c.fp);
}

std::optional<double> recall(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) return std::nullopt;
    return double(c.tp) / double(c.tp + c.fn);
}

double volumetric_similarity(const VoxelMask& pred, const VoxelMask& ref,
                             const MetricConfig& cfg) {
    require_same_geometry(pred, ref);
    const double vp = double(pred.set_count());
    const double vr = double(ref.set_count());
    return 1.0 - std::abs(vp - vr) / (vp + vr + cfg.epsilon);
}

double absolute_volume_difference_ml(const VoxelMask& pred, const VoxelMask& ref) {
    require_same_geometry(pred, ref);
    return std::abs(volume_ml(ref) - volume_ml(pred));
}

std::optional<double> hausdorff_percentile(const VoxelMask& pred, const VoxelMask& ref,
                                           const MetricConfig& cfg) {
    require_same_geometry(pred, ref);
    if (pred.set_count() == 0 || ref.set_count() == 0) return std::nullopt;
    const double a = nearest_rank_percentile(directed_surface_distances(pred, ref),
                                             cfg.hd_percentile);
    const double b = nearest_rank_percentile(directed_surface_distances(ref, pred),
                                             cfg.hd_percentile);
    return std::max(a, b);
}

std::optional<double> average_surface_distance(const VoxelMask& pred,
                                               const VoxelMask& ref) {
    require_same_geometry(pred, ref);
    if (pred.set_count() == 0 || ref.set_count() == 0) return std::nullopt;
    const auto ab = directed_surface_distances(pred, ref);
    const auto ba = directed_surface_distances(ref, pred);
    const double sum = std::accumulate(ab.begin(), ab.end(), 0.0) +
                       std::accumulate(ba.begin(), ba.end(), 0.0);
    return sum / double(ab.size() + ba.size());
}

std::optional<double> surface_dice_at_tolerance(const VoxelMask& pred,
                                                const VoxelMask& ref,
                                                double tolerance_mm) {
    require_same_geometry(pred, ref);
    if (pred.set_count() == 0 || ref.set_count() == 0) return std::nullopt;
    const auto ab = directed_surface_distances(pred, ref);
    const auto ba = directed_surface_distances(ref, pred);
    const auto within = [tolerance_mm](const std::vector<double>& ds) {
        return std::count_if(ds.begin(), ds.end(),
                             [tolerance_mm](double d) { return d <= tolerance_mm; });
    };
    return double(within(ab) + within(ba)) / double(ab.size() + ba.size());
}

SegmentationScores score_case(const VoxelMask& pred, const VoxelMask& ref,
                              const MetricConfig& cfg) {
    require_same_geometry(pred, ref);
    SegmentationScores s;
    const ConfusionCounts c = confusion_counts(pred, ref);
    s.vs = volumetric_similarity(pred, ref, cfg);
    s.avd_ml = absolute_volume_difference_ml(pred, ref);
    s.dice = dice(c);
    s.precision = precision(c);
    s.recall = recall(c);
    s.asd_mm = average_surface_distance(pred, ref);
    s.hd_mm = hausdorff_percentile(pred, ref, cfg);
    for (double t : cfg.sdt_tolerances)
        s.sdt.emplace_back(t, surface_dice_at_tolerance(pred, ref, t));
    return s;
}

ImageLevelScores image_level_scores(const std::vector<std::pair<double, double>>& pred_ref_ml,
                                    const MetricConfig& cfg) {
    if (pred_ref_ml.empty()) throw ArgumentError("no cases");
    ImageLevelScores s;
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& [pred_ml, ref_ml] : pred_ref_ml) {
        if (pred_ml < 0.0 || ref_ml < 0.0) throw ArgumentError("negative volume");
        const bool pred_pos = pred_ml > cfg.lesion_threshold_ml;
        const bool ref_pos = ref_ml > cfg.lesion_threshold_ml;
        if (pred_pos && ref_pos) ++s.tp;
        else if (pred_pos) ++s.fp;
        else if (ref_pos) ++s.fn;
        else ++s.tn;
        scores.push_back(pred_ml);
        labels.push_back(ref_pos ? 1 : 0);
    }
    const double n = double(pred_ref_ml.size());
    s.ccr = double(s.tp + s.tn) / n;
    if (s.tp + s.fn > 0) s.sensitivity = double(s.tp) / double(s.tp + s.fn);
    if (s.tn + s.fp > 0) s.specificity = double(s.tn) / double(s.tn + s.fp);
    if (2 * s.tp + s.fp + s.fn > 0)
        s.f_score = 2.0 * double(s.tp) / double(2 * s.tp + s.fp + s.fn);
    s.auc = rank_auc(scores, labels);
    return s;
}

std::optional<double> rank_auc(const std::vector<double>& scores,
                               const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw ArgumentError("length mismatch");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::size_t n_pos = 0;
    double rank_sum_pos = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * double(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]]) rank_sum_pos += midrank;
        i = j;
    }
    for (int l : labels) n_pos += std::size_t(l != 0);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;
    return (rank_sum_pos - 0.5 * double(n_pos) * double(n_pos + 1)) /
           (double(n_pos) * double(n_neg));
}

VolumeBin volume_bin(double v) {
    if (v < 0.0) throw ArgumentError("negative volume");
    if (v < 1.0) return VolumeBin::B1;
    if (v < 50.0) return VolumeBin::B2;
    if (v < 100.0) return VolumeBin::B3;
    return VolumeBin::B4;
}

}  // namespace mrseg
