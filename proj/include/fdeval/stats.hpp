#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fdeval/error.hpp"

namespace fdeval {

/// Fractional (average-tie) 1-based ranks.
std::vector<double> fractional_ranks(std::span<const double> values);

/// Spearman rank correlation: Pearson correlation of fractional ranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// Product-moment correlation.
double pearson(std::span<const double> x, std::span<const double> y);

/// Mann-Whitney AUROC with half credit for score ties. Labels must contain
/// both classes.
double auroc(std::span<const std::uint8_t> labels, std::span<const double> scores);

/// Failure AUROC: binary failure labels from risk > failure_threshold,
/// scored by negated confidence.
double f_auroc(std::span<const double> risks, std::span<const double> confidences,
               double failure_threshold);

/// OOD AUROC: is_ood labels scored by negated confidence (higher is better
/// when OOD cases get lower confidence).
double ood_auroc(std::span<const std::uint8_t> is_ood, std::span<const double> confidences);

/// Mean absolute error.
double mae(std::span<const double> estimates, std::span<const double> truths);

/// Aligned per-case vectors of one method on one fold.
struct FoldScores {
    std::vector<double> risks;
    std::vector<double> confidences;
};

/// Per-method list of fold score vectors; fold f of every method must hold
/// the same cases in the same order.
struct MethodFolds {
    std::string name;
    std::vector<FoldScores> folds;
};

/// Distribution of per-draw method ranks under bootstrap resampling.
/// Ranks are averaged competition ranks (ties share the mean of their
/// positions), so they advance in half steps; rank_counts[m][k] counts draws
/// where method m ranked 1 + k/2.
struct RankDistribution {
    std::vector<std::string> method_names;
    std::vector<std::vector<std::uint64_t>> rank_counts;  // [method][half-step]
    std::vector<double> median_rank;
    int n_bootstrap = 0;
    std::uint64_t seed = 0;

    static double rank_at(std::size_t half_step) {
        return 1.0 + static_cast<double>(half_step) / 2.0;
    }
};

/// Ranks methods by AURC on bootstrap resamples of every fold's cases and
/// accumulates rank counts over all draws and folds. The resample generator
/// is mt19937_64 seeded per fold with derive_seed(seed, fold); indices are
/// drawn as gen() % fold_size, so identical seeds reproduce identical
/// distributions.
RankDistribution bootstrap_ranking(const std::vector<MethodFolds>& methods,
                                   int n_bootstrap = 500, std::uint64_t seed = 0);

}  // namespace fdeval
