#include "fdeval/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace fdeval {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimMismatch: return "DIM_MISMATCH";
        case ErrorCode::ModeMismatch: return "MODE_MISMATCH";
        case ErrorCode::ClassSetMismatch: return "CLASS_SET_MISMATCH";
        case ErrorCode::BadValue: return "BAD_VALUE";
        case ErrorCode::BadTolerance: return "BAD_TOLERANCE";
        case ErrorCode::BadWidth: return "BAD_WIDTH";
        case ErrorCode::BadPatch: return "BAD_PATCH";
        case ErrorCode::EmptyMap: return "EMPTY_MAP";
        case ErrorCode::TooFewRows: return "TOO_FEW_ROWS";
        case ErrorCode::TooFewSamples: return "TOO_FEW_SAMPLES";
        case ErrorCode::NonfiniteInput: return "NONFINITE_INPUT";
        case ErrorCode::SchemaMismatch: return "SCHEMA_MISMATCH";
        case ErrorCode::SingularAfterRidge: return "SINGULAR_AFTER_RIDGE";
        case ErrorCode::LengthMismatch: return "LENGTH_MISMATCH";
        case ErrorCode::EmptyInput: return "EMPTY_INPUT";
        case ErrorCode::RiskOutOfRange: return "RISK_OUT_OF_RANGE";
        case ErrorCode::NormalizationDegenerate: return "NORMALIZATION_DEGENERATE";
        case ErrorCode::ConstantInput: return "CONSTANT_INPUT";
        case ErrorCode::SingleClass: return "SINGLE_CLASS";
        case ErrorCode::MisalignedCases: return "MISALIGNED_CASES";
        case ErrorCode::EmptyFold: return "EMPTY_FOLD";
        case ErrorCode::BadMagic: return "BAD_MAGIC";
        case ErrorCode::UnsupportedDtype: return "UNSUPPORTED_DTYPE";
        case ErrorCode::FortranOrderUnsupported: return "FORTRAN_ORDER_UNSUPPORTED";
        case ErrorCode::ValueOutOfRange: return "VALUE_OUT_OF_RANGE";
        case ErrorCode::MissingColumn: return "MISSING_COLUMN";
        case ErrorCode::DuplicateCase: return "DUPLICATE_CASE";
        case ErrorCode::UnresolvedPath: return "UNRESOLVED_PATH";
        case ErrorCode::BadConfig: return "BAD_CONFIG";
        case ErrorCode::IoError: return "IO_ERROR";
    }
    return "UNKNOWN";
}

const char* label_mode_name(LabelMode mode) {
    return mode == LabelMode::Exclusive ? "exclusive" : "regions";
}

LabelMode parse_label_mode(const std::string& name) {
    if (name == "exclusive") return LabelMode::Exclusive;
    if (name == "regions") return LabelMode::Regions;
    throw EvalError(ErrorCode::BadValue, "unknown label mode '" + name + "'");
}

const char* risk_metric_name(RiskMetric metric) {
    switch (metric) {
        case RiskMetric::Dsc: return "dsc";
        case RiskMetric::GeneralizedDsc: return "generalized_dsc";
        case RiskMetric::Nsd: return "nsd";
    }
    return "unknown";
}

RiskMetric parse_risk_metric(const std::string& name) {
    if (name == "dsc") return RiskMetric::Dsc;
    if (name == "generalized_dsc") return RiskMetric::GeneralizedDsc;
    if (name == "nsd") return RiskMetric::Nsd;
    throw EvalError(ErrorCode::BadValue, "unknown risk metric '" + name + "'");
}

namespace {

std::size_t checked_voxel_count(const std::vector<std::int64_t>& dims,
                                const std::vector<double>& spacing) {
    if (dims.size() != 2 && dims.size() != 3) {
        throw EvalError(ErrorCode::BadValue,
                        "dims must have 2 or 3 axes, got " + std::to_string(dims.size()));
    }
    if (spacing.size() != dims.size()) {
        throw EvalError(ErrorCode::BadValue, "spacing must have one entry per axis");
    }
    std::size_t n = 1;
    for (auto d : dims) {
        if (d <= 0) throw EvalError(ErrorCode::BadValue, "all dims must be positive");
        n *= static_cast<std::size_t>(d);
    }
    for (auto s : spacing) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw EvalError(ErrorCode::BadValue, "all spacing entries must be positive finite");
        }
    }
    return n;
}

void check_class_ids(const std::vector<std::int32_t>& class_ids) {
    if (class_ids.empty()) {
        throw EvalError(ErrorCode::BadValue, "class_ids must name at least one foreground class");
    }
    std::set<std::int32_t> seen;
    for (auto c : class_ids) {
        if (c == 0) {
            throw EvalError(ErrorCode::BadValue, "class id 0 is reserved for background");
        }
        if (!seen.insert(c).second) {
            throw EvalError(ErrorCode::BadValue, "duplicate class id " + std::to_string(c));
        }
    }
}

}  // namespace

LabelMap LabelMap::exclusive(std::vector<std::int64_t> dims, std::vector<double> spacing,
                             std::vector<std::int32_t> class_ids,
                             std::vector<std::int32_t> labels) {
    std::size_t n = checked_voxel_count(dims, spacing);
    check_class_ids(class_ids);
    if (labels.size() != n) {
        throw EvalError(ErrorCode::BadValue, "label data extent does not match dims");
    }
    std::set<std::int32_t> allowed(class_ids.begin(), class_ids.end());
    for (auto v : labels) {
        if (v != 0 && allowed.find(v) == allowed.end()) {
            throw EvalError(ErrorCode::BadValue,
                            "voxel label " + std::to_string(v) + " is not in class_ids");
        }
    }
    LabelMap m;
    m.dims_ = std::move(dims);
    m.spacing_ = std::move(spacing);
    m.mode_ = LabelMode::Exclusive;
    m.class_ids_ = std::move(class_ids);
    m.voxels_ = n;
    m.labels_ = std::move(labels);
    return m;
}

LabelMap LabelMap::regions(std::vector<std::int64_t> dims, std::vector<double> spacing,
                           std::vector<std::int32_t> class_ids,
                           std::vector<std::uint8_t> masks) {
    std::size_t n = checked_voxel_count(dims, spacing);
    check_class_ids(class_ids);
    if (masks.size() != class_ids.size() * n) {
        throw EvalError(ErrorCode::BadValue,
                        "regions data must have exactly |class_ids| channels of dims extent");
    }
    for (auto v : masks) {
        if (v > 1) throw EvalError(ErrorCode::BadValue, "region masks must be binary");
    }
    LabelMap m;
    m.dims_ = std::move(dims);
    m.spacing_ = std::move(spacing);
    m.mode_ = LabelMode::Regions;
    m.class_ids_ = std::move(class_ids);
    m.voxels_ = n;
    m.masks_ = std::move(masks);
    return m;
}

std::vector<std::uint8_t> LabelMap::class_mask(std::int32_t class_id) const {
    auto it = std::find(class_ids_.begin(), class_ids_.end(), class_id);
    if (it == class_ids_.end()) {
        throw EvalError(ErrorCode::BadValue, "class id " + std::to_string(class_id) +
                                                 " is not part of this map");
    }
    std::vector<std::uint8_t> mask(voxels_, 0);
    if (mode_ == LabelMode::Exclusive) {
        for (std::size_t i = 0; i < voxels_; ++i) mask[i] = labels_[i] == class_id ? 1 : 0;
    } else {
        auto r = static_cast<std::size_t>(it - class_ids_.begin());
        const std::uint8_t* ch = region_channel(r);
        std::copy(ch, ch + voxels_, mask.begin());
    }
    return mask;
}

std::vector<std::uint8_t> LabelMap::foreground_mask() const {
    std::vector<std::uint8_t> mask(voxels_, 0);
    if (mode_ == LabelMode::Exclusive) {
        for (std::size_t i = 0; i < voxels_; ++i) mask[i] = labels_[i] != 0 ? 1 : 0;
    } else {
        for (std::size_t r = 0; r < class_ids_.size(); ++r) {
            const std::uint8_t* ch = region_channel(r);
            for (std::size_t i = 0; i < voxels_; ++i) mask[i] |= ch[i];
        }
    }
    return mask;
}

ConfidenceMap::ConfidenceMap(std::vector<std::int64_t> dims, std::vector<double> values) {
    std::vector<double> unit_spacing(dims.size(), 1.0);
    std::size_t n = checked_voxel_count(dims, unit_spacing);
    if (values.size() != n) {
        throw EvalError(ErrorCode::BadValue, "confidence data extent does not match dims");
    }
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw EvalError(ErrorCode::ValueOutOfRange,
                            "confidence values must lie in [0,1]");
        }
    }
    dims_ = std::move(dims);
    values_ = std::move(values);
}

void RiskSpec::validate() const {
    if (metric == RiskMetric::Nsd) {
        if (!nsd_tolerance && nsd_class_tolerance.empty()) {
            throw EvalError(ErrorCode::BadTolerance, "NSD risk requires a tolerance");
        }
    }
    if (nsd_tolerance && !(*nsd_tolerance > 0.0)) {
        throw EvalError(ErrorCode::BadTolerance, "nsd_tolerance must be > 0");
    }
    for (const auto& [cid, tol] : nsd_class_tolerance) {
        if (!(tol > 0.0)) {
            throw EvalError(ErrorCode::BadTolerance,
                            "nsd tolerance for class " + std::to_string(cid) + " must be > 0");
        }
    }
}

double RiskSpec::tolerance_for(std::int32_t class_id) const {
    auto it = nsd_class_tolerance.find(class_id);
    if (it != nsd_class_tolerance.end()) return it->second;
    if (nsd_tolerance) return *nsd_tolerance;
    throw EvalError(ErrorCode::BadTolerance,
                    "no NSD tolerance configured for class " + std::to_string(class_id));
}

FeatureVector::FeatureVector(std::vector<double> v, std::vector<std::string> s)
    : values(std::move(v)), schema(std::move(s)) {
    if (values.size() != schema.size()) {
        throw EvalError(ErrorCode::SchemaMismatch, "feature count does not match schema length");
    }
    for (double x : values) {
        if (!std::isfinite(x)) {
            throw EvalError(ErrorCode::NonfiniteInput, "feature vector contains non-finite entry");
        }
    }
}

void validate_pair(const LabelMap& pred, const LabelMap& gt) {
    if (pred.dims() != gt.dims()) {
        throw EvalError(ErrorCode::DimMismatch, "dims differ between prediction and reference");
    }
    if (pred.spacing() != gt.spacing()) {
        throw EvalError(ErrorCode::DimMismatch, "spacing differs between prediction and reference");
    }
    if (pred.mode() != gt.mode()) {
        throw EvalError(ErrorCode::ModeMismatch, "label_mode differs between prediction and reference");
    }
    if (pred.class_ids() != gt.class_ids()) {
        throw EvalError(ErrorCode::ClassSetMismatch,
                        "class_ids differ between prediction and reference");
    }
}

void validate_conf_pair(const ConfidenceMap& conf, const LabelMap& pred) {
    if (conf.dims() != pred.dims()) {
        throw EvalError(ErrorCode::DimMismatch, "dims differ between confidence map and prediction");
    }
}

}  // namespace fdeval
