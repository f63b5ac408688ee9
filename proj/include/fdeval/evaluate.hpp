#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdeval/config.hpp"
#include "fdeval/learners.hpp"
#include "fdeval/manifest.hpp"
#include "fdeval/rcanalysis.hpp"
#include "fdeval/stats.hpp"

namespace fdeval {

extern const char* const kToolVersion;

/// Summary metrics of one (method, risk) pairing. Auxiliary metrics are
/// absent when undefined on the data (constant risks, single failure class,
/// no OOD mix).
struct MethodSummary {
    std::string method;
    std::string risk;
    std::size_t n = 0;
    double aurc_value = 0.0;
    double aurc_random_value = 0.0;
    double aurc_optimal_value = 0.0;
    std::optional<double> naurc_value;
    std::optional<double> spearman_value;
    std::optional<double> pearson_value;
    std::optional<double> f_auroc_value;
    std::optional<double> ood_auroc_value;
    std::optional<double> mae_value;
    std::string curve_csv;  // relative to the report directory
    RiskCoverageCurve curve;
};

/// One per-case, per-method failure. Failures void only that method's score
/// for that case; method "case" marks cases whose reference data could not
/// be evaluated at all.
struct ErrorEntry {
    std::string case_id;
    std::string method;
    std::string message;
};

struct EvalReport {
    std::string version;
    nlohmann::ordered_json config_echo;
    std::vector<CaseRecord> cases;
    std::vector<MethodSummary> summaries;
    std::vector<ErrorEntry> errors;
    std::optional<RankDistribution> ranking;
};

/// Runs the full pipeline: per-case risks and confidence scores, per-method
/// risk-coverage summaries, and (when configured) bootstrap ranking over
/// folds. Case-level work runs on a bounded worker pool; results are reduced
/// in manifest order, so the report is schedule-independent.
EvalReport run_evaluate(const Manifest& manifest, const EvalConfig& config);

/// Writes report.json, summary.csv, one curve CSV per (method, risk), and
/// ranking.csv/ranking.json when ranking was computed.
void emit_report(const EvalReport& report, const std::filesystem::path& out_dir);

nlohmann::ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::ordered_json& doc);
EvalReport read_report(const std::filesystem::path& path);

/// Fits the simple-feature regression forest from a training manifest whose
/// rows carry gt, pred, and conf volumes. Targets are the per-class DSC
/// scores followed by the generalized DSC.
ForestModel fit_rf_from_manifest(const Manifest& manifest, int width, int n_trees,
                                 std::uint64_t seed);

/// Fits the Gaussian scorer from a training manifest whose rows carry
/// feature vectors.
GaussianModel fit_mahalanobis_from_manifest(const Manifest& manifest,
                                            double ridge_epsilon = 1e-6);

/// Serializes a double exactly as report JSON does (shortest round-trip
/// form), keeping CSV and JSON outputs byte-consistent.
std::string format_double(double value);

}  // namespace fdeval
