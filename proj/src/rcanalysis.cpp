#include "fdeval/rcanalysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fdeval/numeric.hpp"

namespace fdeval {

RiskCoverageCurve rc_curve(std::span<const double> risks, std::span<const double> confidences) {
    if (risks.empty()) {
        throw EvalError(ErrorCode::EmptyInput, "risk-coverage curve needs at least one sample");
    }
    if (risks.size() != confidences.size()) {
        throw EvalError(ErrorCode::LengthMismatch, "risk and confidence vectors differ in length");
    }
    for (double r : risks) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw EvalError(ErrorCode::RiskOutOfRange, "risks must lie in [0,1]");
        }
    }

    std::size_t n = risks.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // stable sort keeps the accumulation order deterministic within tie groups
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return confidences[a] > confidences[b];
    });

    RiskCoverageCurve curve;
    curve.total_n = n;
    KahanSum risk_sum;
    std::size_t admitted = 0;
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t group_end = pos + 1;
        while (group_end < n && confidences[order[group_end]] == confidences[order[pos]]) {
            ++group_end;
        }
        for (std::size_t k = pos; k < group_end; ++k) risk_sum.add(risks[order[k]]);
        admitted += group_end - pos;
        curve.coverage.push_back(static_cast<double>(admitted) / static_cast<double>(n));
        curve.selective_risk.push_back(risk_sum.value() / static_cast<double>(admitted));
        curve.group_sizes.push_back(group_end - pos);
        pos = group_end;
    }
    return curve;
}

double aurc(const RiskCoverageCurve& curve) {
    KahanSum area;
    double prev_cov = 0.0;
    for (std::size_t g = 0; g < curve.point_count(); ++g) {
        area.add(curve.selective_risk[g] * (curve.coverage[g] - prev_cov));
        prev_cov = curve.coverage[g];
    }
    return area.value();
}

double aurc_random(std::span<const double> risks) {
    if (risks.empty()) {
        throw EvalError(ErrorCode::EmptyInput, "aurc_random needs at least one risk");
    }
    for (double r : risks) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw EvalError(ErrorCode::RiskOutOfRange, "risks must lie in [0,1]");
        }
    }
    return compensated_mean(risks);
}

double aurc_optimal(std::span<const double> risks) {
    if (risks.empty()) {
        throw EvalError(ErrorCode::EmptyInput, "aurc_optimal needs at least one risk");
    }
    std::vector<double> confidences(risks.size());
    for (std::size_t i = 0; i < risks.size(); ++i) confidences[i] = -risks[i];
    return aurc(rc_curve(risks, confidences));
}

double naurc(double aurc_value, double rand_value, double opt_value) {
    // constant risks make random and optimal coincide up to rounding
    if (std::abs(rand_value - opt_value) <= 1e-12) {
        throw EvalError(ErrorCode::NormalizationDegenerate,
                        "random and optimal AURC coincide; nAURC undefined");
    }
    return (aurc_value - opt_value) / (rand_value - opt_value);
}

double operating_point(const RiskCoverageCurve& curve, double max_selective_risk) {
    double best = 0.0;
    for (std::size_t g = 0; g < curve.point_count(); ++g) {
        if (curve.selective_risk[g] <= max_selective_risk) {
            best = std::max(best, curve.coverage[g]);
        }
    }
    return best;
}

}  // namespace fdeval
