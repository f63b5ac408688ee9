#pragma once

#include <vector>

#include "fdeval/datamodel.hpp"

namespace fdeval {

/// Ensemble-agreement confidence: mean DSC over all M(M-1)/2 unordered pairs
/// of prediction samples. Requires M >= 2 mutually compatible maps; samples
/// are never modified (any post-processing happens before the call).
double pairwise_dsc(const std::vector<LabelMap>& samples);

}  // namespace fdeval
