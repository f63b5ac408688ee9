#include "fdeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fdeval/numeric.hpp"
#include "fdeval/rcanalysis.hpp"

namespace fdeval {

std::vector<double> fractional_ranks(std::span<const double> values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t end = pos + 1;
        while (end < n && values[order[end]] == values[order[pos]]) ++end;
        // average of 1-based positions pos+1 .. end
        double rank = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
        for (std::size_t k = pos; k < end; ++k) ranks[order[k]] = rank;
        pos = end;
    }
    return ranks;
}

namespace {

void check_correlation_inputs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw EvalError(ErrorCode::LengthMismatch, "correlation inputs differ in length");
    }
    if (x.size() < 2) {
        throw EvalError(ErrorCode::ConstantInput, "correlation needs at least 2 samples");
    }
}

bool is_constant(std::span<const double> v) {
    for (double x : v) {
        if (x != v[0]) return false;
    }
    return true;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    check_correlation_inputs(x, y);
    if (is_constant(x) || is_constant(y)) {
        throw EvalError(ErrorCode::ConstantInput, "correlation undefined for constant input");
    }
    double mx = compensated_mean(x);
    double my = compensated_mean(y);
    KahanSum sxy, sxx, syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    return sxy.value() / std::sqrt(sxx.value() * syy.value());
}

double spearman(std::span<const double> x, std::span<const double> y) {
    check_correlation_inputs(x, y);
    if (is_constant(x) || is_constant(y)) {
        throw EvalError(ErrorCode::ConstantInput, "correlation undefined for constant input");
    }
    auto rx = fractional_ranks(x);
    auto ry = fractional_ranks(y);
    return pearson(rx, ry);
}

double auroc(std::span<const std::uint8_t> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) {
        throw EvalError(ErrorCode::LengthMismatch, "labels and scores differ in length");
    }
    std::size_t n_pos = 0;
    for (auto l : labels) n_pos += l ? 1 : 0;
    std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw EvalError(ErrorCode::SingleClass, "AUROC needs both label classes");
    }
    // rank-sum form of the Mann-Whitney U; fractional ranks give tied scores
    // half credit
    auto ranks = fractional_ranks(scores);
    KahanSum pos_rank_sum;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i]) pos_rank_sum.add(ranks[i]);
    }
    double np = static_cast<double>(n_pos);
    double u = pos_rank_sum.value() - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

double f_auroc(std::span<const double> risks, std::span<const double> confidences,
               double failure_threshold) {
    if (risks.size() != confidences.size()) {
        throw EvalError(ErrorCode::LengthMismatch, "risks and confidences differ in length");
    }
    std::vector<std::uint8_t> labels(risks.size());
    std::vector<double> scores(risks.size());
    for (std::size_t i = 0; i < risks.size(); ++i) {
        labels[i] = risks[i] > failure_threshold ? 1 : 0;
        scores[i] = -confidences[i];
    }
    return auroc(labels, scores);
}

double ood_auroc(std::span<const std::uint8_t> is_ood, std::span<const double> confidences) {
    std::vector<double> scores(confidences.size());
    for (std::size_t i = 0; i < confidences.size(); ++i) scores[i] = -confidences[i];
    return auroc(is_ood, scores);
}

double mae(std::span<const double> estimates, std::span<const double> truths) {
    if (estimates.size() != truths.size()) {
        throw EvalError(ErrorCode::LengthMismatch, "estimate and truth vectors differ in length");
    }
    if (estimates.empty()) {
        throw EvalError(ErrorCode::EmptyInput, "MAE needs at least one sample");
    }
    KahanSum acc;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        acc.add(std::abs(estimates[i] - truths[i]));
    }
    return acc.value() / static_cast<double>(estimates.size());
}

RankDistribution bootstrap_ranking(const std::vector<MethodFolds>& methods, int n_bootstrap,
                                   std::uint64_t seed) {
    if (methods.empty()) {
        throw EvalError(ErrorCode::EmptyInput, "ranking needs at least one method");
    }
    if (n_bootstrap < 1) {
        throw EvalError(ErrorCode::BadValue, "n_bootstrap must be >= 1");
    }
    std::size_t m = methods.size();
    std::size_t fold_count = methods[0].folds.size();
    for (const auto& method : methods) {
        if (method.folds.size() != fold_count) {
            throw EvalError(ErrorCode::MisalignedCases, "methods disagree on the fold count");
        }
        for (std::size_t f = 0; f < fold_count; ++f) {
            const auto& fs = method.folds[f];
            if (fs.risks.size() != fs.confidences.size()) {
                throw EvalError(ErrorCode::MisalignedCases,
                                "risk and confidence lengths differ in fold " + std::to_string(f));
            }
            if (fs.risks.empty()) {
                throw EvalError(ErrorCode::EmptyFold, "fold " + std::to_string(f) + " is empty");
            }
            if (fs.risks.size() != methods[0].folds[f].risks.size()) {
                throw EvalError(ErrorCode::MisalignedCases,
                                "methods disagree on the case count of fold " + std::to_string(f));
            }
        }
    }

    RankDistribution dist;
    dist.n_bootstrap = n_bootstrap;
    dist.seed = seed;
    dist.method_names.reserve(m);
    for (const auto& method : methods) dist.method_names.push_back(method.name);
    dist.rank_counts.assign(m, std::vector<std::uint64_t>(2 * m - 1, 0));
    std::vector<std::vector<double>> all_ranks(m);

    std::vector<std::size_t> indices;
    std::vector<double> risks, confs, aurcs(m);
    for (std::size_t f = 0; f < fold_count; ++f) {
        std::size_t n = methods[0].folds[f].risks.size();
        std::mt19937_64 rng(derive_seed(seed, f));
        for (int draw = 0; draw < n_bootstrap; ++draw) {
            indices.resize(n);
            for (auto& idx : indices) idx = static_cast<std::size_t>(rng() % n);

            for (std::size_t mi = 0; mi < m; ++mi) {
                const auto& fs = methods[mi].folds[f];
                risks.resize(n);
                confs.resize(n);
                for (std::size_t k = 0; k < n; ++k) {
                    risks[k] = fs.risks[indices[k]];
                    confs[k] = fs.confidences[indices[k]];
                }
                aurcs[mi] = aurc(rc_curve(risks, confs));
            }
            // lower AURC is better, so ascending fractional ranks
            auto ranks = fractional_ranks(aurcs);
            for (std::size_t mi = 0; mi < m; ++mi) {
                auto half_step = static_cast<std::size_t>(std::lround(2.0 * ranks[mi])) - 2;
                dist.rank_counts[mi][half_step] += 1;
                all_ranks[mi].push_back(ranks[mi]);
            }
        }
    }

    dist.median_rank.resize(m);
    for (std::size_t mi = 0; mi < m; ++mi) {
        auto& r = all_ranks[mi];
        std::sort(r.begin(), r.end());
        std::size_t half = r.size() / 2;
        dist.median_rank[mi] =
            r.size() % 2 == 1 ? r[half] : (r[half - 1] + r[half]) / 2.0;
    }
    return dist;
}

}  // namespace fdeval
