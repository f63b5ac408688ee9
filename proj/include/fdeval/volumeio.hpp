#pragma once

#include <filesystem>

#include "fdeval/datamodel.hpp"
#include "fdeval/npy.hpp"
#include "fdeval/segmetrics.hpp"

namespace fdeval {

/// Typed readers over raw NPY arrays. Volume files carry only voxel data;
/// spacing, label mode, and class ids come from the manifest. Shapes are
/// (channel?, z?, y, x): label maps are u8/u16 with D axes (Exclusive) or a
/// leading region axis (Regions); confidence maps are f32/f64 with D axes
/// and values in [0,1]; probability maps add a leading channel axis.

LabelMap read_label_map(const std::filesystem::path& path, const std::vector<double>& spacing,
                        LabelMode mode, const std::vector<std::int32_t>& class_ids);

ConfidenceMap read_confidence_map(const std::filesystem::path& path);

ProbabilityMap read_probability_map(const std::filesystem::path& path,
                                    const std::vector<double>& spacing, LabelMode mode,
                                    const std::vector<std::int32_t>& class_ids);

/// 1D f32/f64 array of finite values.
std::vector<double> read_feature_values(const std::filesystem::path& path);

void write_label_map(const std::filesystem::path& path, const LabelMap& map);
void write_confidence_map(const std::filesystem::path& path, const ConfidenceMap& map);

}  // namespace fdeval
