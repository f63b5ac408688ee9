#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fdeval/error.hpp"
#include "fdeval/grid.hpp"

namespace fdeval {

enum class LabelMode { Exclusive, Regions };

const char* label_mode_name(LabelMode mode);
LabelMode parse_label_mode(const std::string& name);

/// Discrete segmentation on a D-dimensional grid (D = 2 or 3) with physical
/// voxel spacing. Two storage modes:
///   Exclusive — one integer label per voxel, 0 is background, every other
///               value must be one of class_ids.
///   Regions   — |class_ids| binary masks per voxel; regions may overlap.
/// Instances are immutable after construction; all invariants are checked by
/// the factory functions.
class LabelMap {
public:
    static LabelMap exclusive(std::vector<std::int64_t> dims, std::vector<double> spacing,
                              std::vector<std::int32_t> class_ids,
                              std::vector<std::int32_t> labels);

    static LabelMap regions(std::vector<std::int64_t> dims, std::vector<double> spacing,
                            std::vector<std::int32_t> class_ids,
                            std::vector<std::uint8_t> masks);

    const std::vector<std::int64_t>& dims() const { return dims_; }
    const std::vector<double>& spacing() const { return spacing_; }
    LabelMode mode() const { return mode_; }
    const std::vector<std::int32_t>& class_ids() const { return class_ids_; }
    std::size_t voxel_count() const { return voxels_; }
    Grid grid() const { return Grid(dims_); }

    const std::vector<std::int32_t>& labels() const { return labels_; }

    /// Channel r of the Regions stack (length voxel_count()).
    const std::uint8_t* region_channel(std::size_t r) const {
        return masks_.data() + r * voxels_;
    }

    /// One-vs-rest binary mask for a foreground class id.
    std::vector<std::uint8_t> class_mask(std::int32_t class_id) const;

    /// Union of all foreground classes.
    std::vector<std::uint8_t> foreground_mask() const;

private:
    LabelMap() = default;

    std::vector<std::int64_t> dims_;
    std::vector<double> spacing_;
    LabelMode mode_ = LabelMode::Exclusive;
    std::vector<std::int32_t> class_ids_;
    std::size_t voxels_ = 0;
    std::vector<std::int32_t> labels_;  // Exclusive
    std::vector<std::uint8_t> masks_;   // Regions, channel-major
};

/// Per-voxel confidence in [0,1] on the same grid as its LabelMap.
class ConfidenceMap {
public:
    ConfidenceMap(std::vector<std::int64_t> dims, std::vector<double> values);

    const std::vector<std::int64_t>& dims() const { return dims_; }
    const std::vector<double>& values() const { return values_; }
    Grid grid() const { return Grid(dims_); }

private:
    std::vector<std::int64_t> dims_;
    std::vector<double> values_;
};

/// One evaluated test case: identifiers plus per-risk-function risks and
/// per-method confidence scores. Risks are in [0,1]; confidence scores are
/// on arbitrary scales (Mahalanobis scores are negative distances).
struct CaseRecord {
    std::string case_id;
    int fold = 0;
    std::string domain;
    bool is_ood = false;
    std::map<std::string, double> risks;
    std::map<std::string, double> confidences;
};

enum class RiskMetric { Dsc, GeneralizedDsc, Nsd };

const char* risk_metric_name(RiskMetric metric);
RiskMetric parse_risk_metric(const std::string& name);

/// Selects the segmentation metric whose complement defines the risk.
/// nsd_tolerance is the shared default tolerance (physical units); individual
/// classes can override it via nsd_class_tolerance.
struct RiskSpec {
    RiskMetric metric = RiskMetric::Dsc;
    std::optional<std::vector<std::int32_t>> class_subset;
    std::optional<double> nsd_tolerance;
    std::map<std::int32_t, double> nsd_class_tolerance;

    RiskSpec() = default;
    explicit RiskSpec(RiskMetric m) : metric(m) {}

    void validate() const;
    double tolerance_for(std::int32_t class_id) const;
};

/// Fixed-length real feature vector with named entries.
struct FeatureVector {
    std::vector<double> values;
    std::vector<std::string> schema;

    FeatureVector() = default;
    FeatureVector(std::vector<double> v, std::vector<std::string> s);
};

/// Checks that two label maps live on the same grid (dims and spacing), use
/// the same mode, and carry the same class set. Throws the matching error.
void validate_pair(const LabelMap& pred, const LabelMap& gt);

/// Throws DimMismatch when a confidence map is not on the label map's grid.
void validate_conf_pair(const ConfidenceMap& conf, const LabelMap& pred);

}  // namespace fdeval
