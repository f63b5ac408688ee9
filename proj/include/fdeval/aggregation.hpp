#pragma once

#include <cstdint>
#include <vector>

#include "fdeval/datamodel.hpp"

namespace fdeval {

/// Voxels within Chebyshev distance < width of a label transition. A
/// transition voxel has a face-adjacent neighbor with a different predicted
/// label (Regions: differing in any channel). Uniform maps yield the empty
/// set; width 1 marks exactly the transition voxels.
std::vector<std::uint8_t> boundary_mask(const LabelMap& pred, int width);

/// Arithmetic mean over all voxels.
double agg_mean(const ConfidenceMap& conf);

/// Mean over voxels outside boundary_mask(pred, width); falls back to
/// agg_mean when the boundary covers the whole image.
double agg_non_boundary(const ConfidenceMap& conf, const LabelMap& pred, int width = 4);

/// Mean over predicted-foreground voxels excluding the boundary region.
/// Empty set falls back to all predicted foreground, then to agg_mean.
double agg_mean_foreground(const ConfidenceMap& conf, const LabelMap& pred, int width = 4);

/// Minimum over sliding-window means. Windows are patch_size^D, stride
/// max(1, patch_size/2), with the final window per axis clamped to end at
/// the image border; images smaller than the patch use one whole-image
/// window per axis.
double agg_patch_min(const ConfidenceMap& conf, int patch_size = 10);

/// Number of face-connected foreground components (4-connectivity in 2D,
/// 6-connectivity in 3D).
std::size_t connected_components(const std::vector<std::uint8_t>& mask,
                                 const std::vector<std::int64_t>& dims);

/// The five heuristic features used by the trained confidence regressor:
/// mean confidence in predicted foreground / background / boundary region,
/// foreground fraction, and foreground component count. Empty regions score
/// mean confidence 1.0.
FeatureVector simple_features(const ConfidenceMap& conf, const LabelMap& pred, int width = 4);

/// Schema of simple_features, in order.
const std::vector<std::string>& simple_feature_schema();

}  // namespace fdeval
