#pragma once

#include <cstdint>
#include <vector>

namespace fdeval {

/// Exact squared Euclidean distance transform on a 2D/3D grid with
/// anisotropic voxel spacing. `sources` marks voxels at distance zero;
/// the result holds, per voxel, the squared physical distance to the
/// nearest source (infinity when no source exists).
std::vector<double> squared_distance_transform(const std::vector<std::int64_t>& dims,
                                               const std::vector<double>& spacing,
                                               const std::vector<std::uint8_t>& sources);

}  // namespace fdeval
