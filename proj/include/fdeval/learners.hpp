#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdeval/datamodel.hpp"

namespace fdeval {

/// Row-major matrix of doubles; rows are samples.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
};

/// Per-column z-score parameters; zero-variance columns record std 1 and map
/// to all-zero.
struct StandardizeParams {
    std::vector<double> means;
    std::vector<double> stds;

    std::vector<double> apply(const std::vector<double>& row) const;
};

/// Fits per-column population z-scores and returns the standardized matrix.
std::pair<StandardizeParams, Matrix> standardize_fit_apply(const Matrix& features);

/// One node of a regression tree, stored flat. Leaves keep the mean target
/// vector of their training rows.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<double> leaf_value;
};

struct Tree {
    std::vector<TreeNode> nodes;

    const std::vector<double>& predict(const double* features) const;
};

struct RfOptions {
    int n_trees = 100;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

/// Bagged multi-output CART regression forest over standardized features.
/// Trees split on the total across-target variance reduction, consider every
/// feature at each split, and grow until nodes are pure or hold fewer than
/// two samples.
struct ForestModel {
    int n_trees = 0;
    std::uint64_t seed = 0;
    std::vector<Tree> trees;
    StandardizeParams standardize;
    std::vector<std::string> feature_schema;
    std::vector<std::string> target_schema;  // per-class targets first, aggregate target last

    std::string to_json_string() const;
    static ForestModel from_json_string(const std::string& text);
};

ForestModel rf_fit(const Matrix& features, const Matrix& targets,
                   const std::vector<std::string>& feature_schema,
                   const std::vector<std::string>& target_schema, const RfOptions& options);

/// Mean over tree predictions, all targets.
std::vector<double> rf_predict(const ForestModel& model, const FeatureVector& features);

/// Confidence score: mean over the per-class targets (all but the final
/// aggregate target when there is more than one).
double rf_confidence(const ForestModel& model, const FeatureVector& features);

/// Multivariate Gaussian over training feature vectors; used through the
/// Mahalanobis distance to the fitted mean.
struct GaussianModel {
    std::vector<double> mean;
    Matrix covariance;       // sample covariance before ridge
    Matrix precision;        // inverse of (covariance + ridge)
    double ridge_epsilon = 1e-6;
    double ridge_value = 0.0;  // actual diagonal addition used

    std::string to_json_string() const;
    static GaussianModel from_json_string(const std::string& text);
};

GaussianModel mahalanobis_fit(const Matrix& features, double ridge_epsilon = 1e-6);

double mahalanobis_distance(const GaussianModel& model, const std::vector<double>& feature);

/// kappa = -distance: higher confidence means closer to the training
/// distribution.
double mahalanobis_confidence(const GaussianModel& model, const std::vector<double>& feature);

}  // namespace fdeval
