#include "fdeval/segmetrics.hpp"

#include <algorithm>
#include <cmath>

#include "fdeval/distance.hpp"
#include "fdeval/numeric.hpp"

namespace fdeval {

ProbabilityMap::ProbabilityMap(std::vector<std::int64_t> dims, std::vector<double> spacing,
                               LabelMode mode, std::vector<std::int32_t> class_ids,
                               std::vector<double> data) {
    if (dims.size() != 2 && dims.size() != 3) {
        throw EvalError(ErrorCode::BadValue, "probability map must be 2D or 3D");
    }
    if (spacing.size() != dims.size()) {
        throw EvalError(ErrorCode::BadValue, "spacing must have one entry per axis");
    }
    if (class_ids.empty()) {
        throw EvalError(ErrorCode::BadValue, "class_ids must name at least one class");
    }
    std::size_t voxels = 1;
    for (auto d : dims) {
        if (d <= 0) throw EvalError(ErrorCode::BadValue, "all dims must be positive");
        voxels *= static_cast<std::size_t>(d);
    }
    std::size_t channels =
        mode == LabelMode::Exclusive ? class_ids.size() + 1 : class_ids.size();
    if (data.size() != channels * voxels) {
        throw EvalError(ErrorCode::BadValue, "probability data extent does not match dims");
    }
    for (double p : data) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw EvalError(ErrorCode::ValueOutOfRange, "probabilities must lie in [0,1]");
        }
    }
    if (mode == LabelMode::Exclusive) {
        for (std::size_t i = 0; i < voxels; ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < channels; ++c) s += data[c * voxels + i];
            if (std::abs(s - 1.0) > 1e-5) {
                throw EvalError(ErrorCode::BadValue,
                                "exclusive probabilities must sum to 1 per voxel");
            }
        }
    }
    dims_ = std::move(dims);
    spacing_ = std::move(spacing);
    mode_ = mode;
    class_ids_ = std::move(class_ids);
    channels_ = channels;
    voxels_ = voxels;
    data_ = std::move(data);
}

double dsc_binary(const std::vector<std::uint8_t>& pred_mask,
                  const std::vector<std::uint8_t>& gt_mask) {
    if (pred_mask.size() != gt_mask.size()) {
        throw EvalError(ErrorCode::DimMismatch, "mask sizes differ");
    }
    std::size_t inter = 0, p = 0, g = 0;
    for (std::size_t i = 0; i < pred_mask.size(); ++i) {
        p += pred_mask[i];
        g += gt_mask[i];
        inter += static_cast<std::size_t>(pred_mask[i] & gt_mask[i]);
    }
    if (p + g == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(p + g);
}

namespace {

std::vector<std::int32_t> effective_classes(const LabelMap& gt, const RiskSpec& spec) {
    if (!spec.class_subset) return gt.class_ids();
    for (auto c : *spec.class_subset) {
        if (std::find(gt.class_ids().begin(), gt.class_ids().end(), c) == gt.class_ids().end()) {
            throw EvalError(ErrorCode::BadValue,
                            "class_subset names class " + std::to_string(c) +
                                " which is not in the map");
        }
    }
    return *spec.class_subset;
}

std::vector<std::uint8_t> boundary_voxels(const std::vector<std::uint8_t>& mask,
                                          const Grid& grid) {
    std::vector<std::uint8_t> boundary(mask.size(), 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        if (grid.on_border(i)) {
            boundary[i] = 1;
            continue;
        }
        bool surface = false;
        grid.for_each_face_neighbor(i, [&](std::size_t j) {
            if (!mask[j]) surface = true;
        });
        boundary[i] = surface ? 1 : 0;
    }
    return boundary;
}

}  // namespace

double mean_dsc(const LabelMap& pred, const LabelMap& gt) {
    validate_pair(pred, gt);
    KahanSum acc;
    for (auto c : gt.class_ids()) {
        acc.add(dsc_binary(pred.class_mask(c), gt.class_mask(c)));
    }
    return acc.value() / static_cast<double>(gt.class_ids().size());
}

double generalized_dsc(const LabelMap& pred, const LabelMap& gt) {
    validate_pair(pred, gt);
    double num = 0.0, den = 0.0;
    for (auto c : gt.class_ids()) {
        auto pm = pred.class_mask(c);
        auto gm = gt.class_mask(c);
        std::size_t inter = 0, p = 0, g = 0;
        for (std::size_t i = 0; i < pm.size(); ++i) {
            p += pm[i];
            g += gm[i];
            inter += static_cast<std::size_t>(pm[i] & gm[i]);
        }
        double gd = static_cast<double>(std::max<std::size_t>(g, 1));
        double w = 1.0 / (gd * gd);
        num += 2.0 * w * static_cast<double>(inter);
        den += w * static_cast<double>(p + g);
    }
    if (den == 0.0) return 1.0;
    return num / den;
}

double nsd_binary(const std::vector<std::uint8_t>& pred_mask,
                  const std::vector<std::uint8_t>& gt_mask,
                  const std::vector<std::int64_t>& dims, const std::vector<double>& spacing,
                  double tolerance) {
    if (pred_mask.size() != gt_mask.size()) {
        throw EvalError(ErrorCode::DimMismatch, "mask sizes differ");
    }
    if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
        throw EvalError(ErrorCode::BadTolerance, "tolerance must be positive finite");
    }
    Grid grid(dims);
    if (grid.size() != pred_mask.size()) {
        throw EvalError(ErrorCode::DimMismatch, "mask size does not match dims");
    }

    auto bp = boundary_voxels(pred_mask, grid);
    auto bg = boundary_voxels(gt_mask, grid);
    std::size_t np = 0, ng = 0;
    for (auto v : bp) np += v;
    for (auto v : bg) ng += v;
    if (np == 0 && ng == 0) return 1.0;
    if (np == 0 || ng == 0) return 0.0;

    // distance compared squared to avoid sqrt rounding at the tolerance edge
    double tol2 = tolerance * tolerance;
    auto d2_to_gt = squared_distance_transform(dims, spacing, bg);
    auto d2_to_pred = squared_distance_transform(dims, spacing, bp);

    std::size_t hits = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (bp[i] && d2_to_gt[i] <= tol2) ++hits;
        if (bg[i] && d2_to_pred[i] <= tol2) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(np + ng);
}

double compute_metric(const LabelMap& pred, const LabelMap& gt, const RiskSpec& spec) {
    validate_pair(pred, gt);
    spec.validate();
    switch (spec.metric) {
        case RiskMetric::Dsc: {
            auto classes = effective_classes(gt, spec);
            KahanSum acc;
            for (auto c : classes) acc.add(dsc_binary(pred.class_mask(c), gt.class_mask(c)));
            return acc.value() / static_cast<double>(classes.size());
        }
        case RiskMetric::GeneralizedDsc:
            return generalized_dsc(pred, gt);
        case RiskMetric::Nsd: {
            auto classes = effective_classes(gt, spec);
            KahanSum acc;
            for (auto c : classes) {
                acc.add(nsd_binary(pred.class_mask(c), gt.class_mask(c), gt.dims(), gt.spacing(),
                                   spec.tolerance_for(c)));
            }
            return acc.value() / static_cast<double>(classes.size());
        }
    }
    throw EvalError(ErrorCode::BadValue, "unknown risk metric");
}

double compute_risk(const LabelMap& pred, const LabelMap& gt, const RiskSpec& spec) {
    return 1.0 - compute_metric(pred, gt, spec);
}

LabelMap probs_to_prediction(const ProbabilityMap& probs) {
    std::size_t n = probs.voxel_count();
    if (probs.mode() == LabelMode::Exclusive) {
        std::vector<std::int32_t> labels(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_p = probs.channel(0)[i];
            for (std::size_t c = 1; c < probs.channel_count(); ++c) {
                double p = probs.channel(c)[i];
                if (p > best_p) {
                    best_p = p;
                    best = c;
                }
            }
            labels[i] = best == 0 ? 0 : probs.class_ids()[best - 1];
        }
        return LabelMap::exclusive(probs.dims(), probs.spacing(), probs.class_ids(),
                                   std::move(labels));
    }
    std::vector<std::uint8_t> masks(probs.channel_count() * n, 0);
    for (std::size_t c = 0; c < probs.channel_count(); ++c) {
        const double* ch = probs.channel(c);
        for (std::size_t i = 0; i < n; ++i) masks[c * n + i] = ch[i] >= 0.5 ? 1 : 0;
    }
    return LabelMap::regions(probs.dims(), probs.spacing(), probs.class_ids(), std::move(masks));
}

namespace {

inline double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

inline double binary_entropy(double p) { return -plogp(p) - plogp(1.0 - p); }

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

ConfidenceMap probs_to_confidence(const ProbabilityMap& probs) {
    std::size_t n = probs.voxel_count();
    std::vector<double> conf(n);
    if (probs.mode() == LabelMode::Exclusive) {
        double log_c = std::log(static_cast<double>(probs.channel_count()));
        for (std::size_t i = 0; i < n; ++i) {
            double pe = 0.0;
            for (std::size_t c = 0; c < probs.channel_count(); ++c) {
                pe -= plogp(probs.channel(c)[i]);
            }
            conf[i] = clamp01(1.0 - pe / log_c);
        }
    } else {
        double log2 = std::log(2.0);
        for (std::size_t i = 0; i < n; ++i) {
            double min_conf = 1.0;
            for (std::size_t c = 0; c < probs.channel_count(); ++c) {
                double conf_r = 1.0 - binary_entropy(probs.channel(c)[i]) / log2;
                min_conf = std::min(min_conf, conf_r);
            }
            conf[i] = clamp01(min_conf);
        }
    }
    return ConfidenceMap(probs.dims(), std::move(conf));
}

}  // namespace fdeval
