#pragma once

#include <cstdint>
#include <vector>

#include "fdeval/datamodel.hpp"

namespace fdeval {

/// Per-voxel class probabilities on a D-dimensional grid.
///   Exclusive — channel 0 is background, channel i (i >= 1) is class_ids[i-1];
///               per-voxel channel sums must be 1 within 1e-5.
///   Regions   — one independent probability channel per region in class_ids.
/// Data is channel-major: channel c occupies [c*voxels, (c+1)*voxels).
class ProbabilityMap {
public:
    ProbabilityMap(std::vector<std::int64_t> dims, std::vector<double> spacing,
                   LabelMode mode, std::vector<std::int32_t> class_ids,
                   std::vector<double> data);

    const std::vector<std::int64_t>& dims() const { return dims_; }
    const std::vector<double>& spacing() const { return spacing_; }
    LabelMode mode() const { return mode_; }
    const std::vector<std::int32_t>& class_ids() const { return class_ids_; }
    std::size_t channel_count() const { return channels_; }
    std::size_t voxel_count() const { return voxels_; }
    const double* channel(std::size_t c) const { return data_.data() + c * voxels_; }

private:
    std::vector<std::int64_t> dims_;
    std::vector<double> spacing_;
    LabelMode mode_ = LabelMode::Exclusive;
    std::vector<std::int32_t> class_ids_;
    std::size_t channels_ = 0;
    std::size_t voxels_ = 0;
    std::vector<double> data_;
};

/// Dice overlap of two binary masks on the same grid. Both masks empty
/// scores 1.0 (a structure correctly predicted absent).
double dsc_binary(const std::vector<std::uint8_t>& pred_mask,
                  const std::vector<std::uint8_t>& gt_mask);

/// Unweighted mean of one-vs-rest Dice over all foreground classes.
double mean_dsc(const LabelMap& pred, const LabelMap& gt);

/// Volume-weighted multi-class Dice with weights 1/max(|G_c|,1)^2.
/// 1.0 when every class is empty in both maps.
double generalized_dsc(const LabelMap& pred, const LabelMap& gt);

/// Normalized surface distance of two binary masks: the fraction of boundary
/// voxels of either mask lying within `tolerance` (physical units) of the
/// other mask's boundary. Boundary voxels are mask voxels with a face
/// neighbor outside the mask or on the grid border. Both boundaries empty
/// scores 1.0; exactly one empty scores 0.0.
double nsd_binary(const std::vector<std::uint8_t>& pred_mask,
                  const std::vector<std::uint8_t>& gt_mask,
                  const std::vector<std::int64_t>& dims, const std::vector<double>& spacing,
                  double tolerance);

/// Risk = 1 - metric. DSC and NSD average over foreground classes (or the
/// spec's class_subset); generalized DSC is already a scalar.
double compute_risk(const LabelMap& pred, const LabelMap& gt, const RiskSpec& spec);

/// Metric value (not complemented) for the same spec; compute_risk is its
/// exact complement.
double compute_metric(const LabelMap& pred, const LabelMap& gt, const RiskSpec& spec);

/// Discrete decision rule: argmax channel for Exclusive (ties resolve to the
/// lowest channel index), per-region threshold at 0.5 for Regions.
LabelMap probs_to_prediction(const ProbabilityMap& probs);

/// Entropy-based confidence map. Exclusive: 1 - PE/ln(C) with predictive
/// entropy PE = -sum_c p_c ln p_c. Regions: per region 1 - H_b(p_r)/ln 2,
/// then the per-voxel minimum over regions.
ConfidenceMap probs_to_confidence(const ProbabilityMap& probs);

}  // namespace fdeval
