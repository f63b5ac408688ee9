#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fdeval/error.hpp"

namespace fdeval {

/// Risk-coverage curve: one working point per distinct confidence value.
/// Sweeping the acceptance threshold from the highest confidence downwards,
/// samples sharing a confidence value cross the threshold together, so they
/// are admitted as one tie group and the curve records (coverage, selective
/// risk) after each group. Coverage is strictly increasing and ends at 1.0,
/// where the selective risk equals the overall mean risk.
struct RiskCoverageCurve {
    std::vector<double> coverage;
    std::vector<double> selective_risk;
    std::vector<std::size_t> group_sizes;
    std::size_t total_n = 0;

    std::size_t point_count() const { return coverage.size(); }
};

/// Builds the curve from per-case risks (in [0,1]) and confidence scores
/// (any scale, higher = more trustworthy).
RiskCoverageCurve rc_curve(std::span<const double> risks, std::span<const double> confidences);

/// Area under the risk-coverage curve: sum over tie groups of
/// selective_risk * delta_coverage. Equals the average selective risk across
/// thresholds; with no ties this is the mean over k of the top-k mean risk.
/// Lower is better.
double aurc(const RiskCoverageCurve& curve);

/// AURC of a random confidence ordering: the overall mean risk.
double aurc_random(std::span<const double> risks);

/// AURC of the best possible ordering (admit lowest risk first, equal risks
/// grouped).
double aurc_optimal(std::span<const double> risks);

/// Normalizes AURC so 0 is the optimal score and 1 the random score.
/// Degenerate when random and optimal coincide (constant risks).
double naurc(double aurc_value, double rand_value, double opt_value);

/// Largest recorded coverage whose selective risk stays within
/// max_selective_risk; 0.0 when no working point qualifies.
double operating_point(const RiskCoverageCurve& curve, double max_selective_risk);

}  // namespace fdeval
