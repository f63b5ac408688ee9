#include "fdeval/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <json.hpp>

#include "fdeval/numeric.hpp"

namespace fdeval {

std::vector<double> StandardizeParams::apply(const std::vector<double>& row) const {
    if (row.size() != means.size()) {
        throw EvalError(ErrorCode::SchemaMismatch, "feature count does not match fitted columns");
    }
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - means[j]) / stds[j];
    return out;
}

std::pair<StandardizeParams, Matrix> standardize_fit_apply(const Matrix& features) {
    if (features.rows < 2) {
        throw EvalError(ErrorCode::TooFewRows, "standardization needs at least 2 rows");
    }
    StandardizeParams params;
    params.means.resize(features.cols);
    params.stds.resize(features.cols);
    for (std::size_t j = 0; j < features.cols; ++j) {
        KahanSum sum;
        for (std::size_t i = 0; i < features.rows; ++i) sum.add(features.at(i, j));
        double mean = sum.value() / static_cast<double>(features.rows);
        KahanSum sq;
        for (std::size_t i = 0; i < features.rows; ++i) {
            double d = features.at(i, j) - mean;
            sq.add(d * d);
        }
        double var = sq.value() / static_cast<double>(features.rows);  // population
        params.means[j] = mean;
        params.stds[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    Matrix out(features.rows, features.cols);
    for (std::size_t i = 0; i < features.rows; ++i) {
        for (std::size_t j = 0; j < features.cols; ++j) {
            out.at(i, j) = (features.at(i, j) - params.means[j]) / params.stds[j];
        }
    }
    return {std::move(params), std::move(out)};
}

const std::vector<double>& Tree::predict(const double* features) const {
    std::size_t node = 0;
    while (nodes[node].feature >= 0) {
        const TreeNode& n = nodes[node];
        node = features[n.feature] <= n.threshold ? static_cast<std::size_t>(n.left)
                                                  : static_cast<std::size_t>(n.right);
    }
    return nodes[node].leaf_value;
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const Matrix& y) : x_(x), y_(y) {}

    Tree build(std::vector<std::size_t> indices) {
        Tree tree;
        grow(tree, std::move(indices));
        return tree;
    }

private:
    std::int32_t grow(Tree& tree, std::vector<std::size_t> indices) {
        auto node_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();

        if (indices.size() < 2 || is_pure(indices)) {
            tree.nodes[node_id].leaf_value = mean_target(indices);
            return node_id;
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_sse = std::numeric_limits<double>::infinity();

        std::vector<std::size_t> order(indices);
        for (std::size_t f = 0; f < x_.cols; ++f) {
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return x_.at(a, f) < x_.at(b, f);
            });
            scan_splits(order, f, best_feature, best_threshold, best_sse);
        }

        if (best_feature < 0) {
            // all rows identical in every feature
            tree.nodes[node_id].leaf_value = mean_target(indices);
            return node_id;
        }

        std::vector<std::size_t> left, right;
        for (auto i : indices) {
            (x_.at(i, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right)
                .push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();

        std::int32_t l = grow(tree, std::move(left));
        std::int32_t r = grow(tree, std::move(right));
        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        tree.nodes[node_id].left = l;
        tree.nodes[node_id].right = r;
        return node_id;
    }

    bool is_pure(const std::vector<std::size_t>& indices) const {
        const double* first = y_.row(indices[0]);
        for (std::size_t k = 1; k < indices.size(); ++k) {
            const double* row = y_.row(indices[k]);
            for (std::size_t t = 0; t < y_.cols; ++t) {
                if (row[t] != first[t]) return false;
            }
        }
        return true;
    }

    std::vector<double> mean_target(const std::vector<std::size_t>& indices) const {
        std::vector<double> out(y_.cols);
        for (std::size_t t = 0; t < y_.cols; ++t) {
            KahanSum acc;
            for (auto i : indices) acc.add(y_.at(i, t));
            out[t] = acc.value() / static_cast<double>(indices.size());
        }
        return out;
    }

    // Scans every boundary between distinct adjacent feature values of the
    // sorted index list. The split cost is the summed per-target SSE of both
    // children, computed from running prefix sums.
    void scan_splits(const std::vector<std::size_t>& order, std::size_t feature,
                     int& best_feature, double& best_threshold, double& best_sse) const {
        std::size_t m = order.size();
        std::size_t t_count = y_.cols;

        std::vector<double> total_sum(t_count, 0.0), total_sq(t_count, 0.0);
        for (auto i : order) {
            for (std::size_t t = 0; t < t_count; ++t) {
                double v = y_.at(i, t);
                total_sum[t] += v;
                total_sq[t] += v * v;
            }
        }

        std::vector<double> left_sum(t_count, 0.0), left_sq(t_count, 0.0);
        for (std::size_t k = 1; k < m; ++k) {
            std::size_t prev = order[k - 1];
            for (std::size_t t = 0; t < t_count; ++t) {
                double v = y_.at(prev, t);
                left_sum[t] += v;
                left_sq[t] += v * v;
            }
            double x_prev = x_.at(prev, feature);
            double x_curr = x_.at(order[k], feature);
            if (x_prev == x_curr) continue;

            double sse = 0.0;
            auto nl = static_cast<double>(k);
            auto nr = static_cast<double>(m - k);
            for (std::size_t t = 0; t < t_count; ++t) {
                double rs = total_sum[t] - left_sum[t];
                double rq = total_sq[t] - left_sq[t];
                sse += left_sq[t] - left_sum[t] * left_sum[t] / nl;
                sse += rq - rs * rs / nr;
            }
            if (sse < best_sse) {
                best_sse = sse;
                best_feature = static_cast<int>(feature);
                best_threshold = x_prev + (x_curr - x_prev) / 2.0;
            }
        }
    }

    const Matrix& x_;
    const Matrix& y_;
};

void check_finite(const Matrix& m, const char* what) {
    for (double v : m.data) {
        if (!std::isfinite(v)) {
            throw EvalError(ErrorCode::NonfiniteInput, std::string(what) + " contain non-finite values");
        }
    }
}

}  // namespace

ForestModel rf_fit(const Matrix& features, const Matrix& targets,
                   const std::vector<std::string>& feature_schema,
                   const std::vector<std::string>& target_schema, const RfOptions& options) {
    if (features.rows < 5) {
        throw EvalError(ErrorCode::TooFewSamples, "forest fit needs at least 5 samples");
    }
    if (features.rows != targets.rows) {
        throw EvalError(ErrorCode::LengthMismatch, "feature and target row counts differ");
    }
    if (feature_schema.size() != features.cols || target_schema.size() != targets.cols) {
        throw EvalError(ErrorCode::SchemaMismatch, "schema lengths do not match matrix columns");
    }
    if (options.n_trees < 1) {
        throw EvalError(ErrorCode::BadValue, "n_trees must be >= 1");
    }
    check_finite(features, "features");
    check_finite(targets, "targets");

    auto [params, x] = standardize_fit_apply(features);

    ForestModel model;
    model.n_trees = options.n_trees;
    model.seed = options.seed;
    model.standardize = std::move(params);
    model.feature_schema = feature_schema;
    model.target_schema = target_schema;
    model.trees.reserve(static_cast<std::size_t>(options.n_trees));

    TreeBuilder builder(x, targets);
    std::size_t n = features.rows;
    for (int t = 0; t < options.n_trees; ++t) {
        std::vector<std::size_t> indices(n);
        if (options.bootstrap) {
            // per-tree substream keeps fits schedule-independent
            std::mt19937_64 rng(derive_seed(options.seed, static_cast<std::uint64_t>(t)));
            for (auto& idx : indices) idx = static_cast<std::size_t>(rng() % n);
        } else {
            std::iota(indices.begin(), indices.end(), std::size_t{0});
        }
        model.trees.push_back(builder.build(std::move(indices)));
    }
    return model;
}

std::vector<double> rf_predict(const ForestModel& model, const FeatureVector& features) {
    if (features.schema != model.feature_schema) {
        throw EvalError(ErrorCode::SchemaMismatch, "feature schema does not match the model");
    }
    auto x = model.standardize.apply(features.values);
    std::size_t t_count = model.target_schema.size();
    std::vector<KahanSum> acc(t_count);
    for (const auto& tree : model.trees) {
        const auto& leaf = tree.predict(x.data());
        for (std::size_t t = 0; t < t_count; ++t) acc[t].add(leaf[t]);
    }
    std::vector<double> out(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        out[t] = acc[t].value() / static_cast<double>(model.trees.size());
    }
    return out;
}

double rf_confidence(const ForestModel& model, const FeatureVector& features) {
    auto pred = rf_predict(model, features);
    // the final target is the aggregate score; kappa averages the per-class ones
    std::size_t class_targets = pred.size() > 1 ? pred.size() - 1 : pred.size();
    KahanSum acc;
    for (std::size_t t = 0; t < class_targets; ++t) acc.add(pred[t]);
    return acc.value() / static_cast<double>(class_targets);
}

GaussianModel mahalanobis_fit(const Matrix& features, double ridge_epsilon) {
    if (features.rows < 2) {
        throw EvalError(ErrorCode::TooFewSamples, "Gaussian fit needs at least 2 samples");
    }
    if (features.cols < 1) {
        throw EvalError(ErrorCode::BadValue, "Gaussian fit needs at least 1 feature column");
    }
    check_finite(features, "features");

    auto n = static_cast<Eigen::Index>(features.rows);
    auto d = static_cast<Eigen::Index>(features.cols);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
        features.data.data(), n, d);

    Eigen::VectorXd mean = x.colwise().mean().transpose();
    Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

    // ridge scaled to the mean diagonal; degenerate (all-identical) samples
    // fall back to an absolute ridge so the fit stays positive definite
    double scale = cov.trace() / static_cast<double>(d);
    if (!(scale > 0.0)) scale = 1.0;
    double ridge = ridge_epsilon * scale;

    Eigen::MatrixXd regularized = cov + ridge * Eigen::MatrixXd::Identity(d, d);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(regularized);
    if (ldlt.info() != Eigen::Success) {
        throw EvalError(ErrorCode::SingularAfterRidge, "covariance not invertible after ridge");
    }
    Eigen::MatrixXd precision = ldlt.solve(Eigen::MatrixXd::Identity(d, d));
    double residual = (precision * regularized - Eigen::MatrixXd::Identity(d, d))
                          .cwiseAbs()
                          .maxCoeff();
    if (!(residual < 1e-6)) {
        throw EvalError(ErrorCode::SingularAfterRidge, "covariance not invertible after ridge");
    }

    GaussianModel model;
    model.ridge_epsilon = ridge_epsilon;
    model.ridge_value = ridge;
    model.mean.assign(mean.data(), mean.data() + d);
    model.covariance = Matrix(features.cols, features.cols);
    model.precision = Matrix(features.cols, features.cols);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            model.covariance.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                cov(i, j);
            model.precision.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                precision(i, j);
        }
    }
    return model;
}

double mahalanobis_distance(const GaussianModel& model, const std::vector<double>& feature) {
    std::size_t d = model.mean.size();
    if (feature.size() != d) {
        throw EvalError(ErrorCode::DimMismatch, "feature dimension does not match the model");
    }
    std::vector<double> delta(d);
    for (std::size_t i = 0; i < d; ++i) delta[i] = feature[i] - model.mean[i];
    double q = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < d; ++j) row += model.precision.at(i, j) * delta[j];
        q += delta[i] * row;
    }
    return std::sqrt(std::max(0.0, q));
}

double mahalanobis_confidence(const GaussianModel& model, const std::vector<double>& feature) {
    return -mahalanobis_distance(model, feature);
}

namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < m.rows; ++i) {
        if (rows[i].size() != m.cols) {
            throw EvalError(ErrorCode::BadValue, "ragged matrix in model file");
        }
        for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j].get<double>();
    }
    return m;
}

}  // namespace

std::string ForestModel::to_json_string() const {
    json doc;
    doc["model"] = "regression_forest";
    doc["n_trees"] = n_trees;
    doc["seed"] = seed;
    doc["feature_schema"] = feature_schema;
    doc["target_schema"] = target_schema;
    doc["standardize"]["means"] = standardize.means;
    doc["standardize"]["stds"] = standardize.stds;
    json jtrees = json::array();
    for (const auto& tree : trees) {
        json jnodes = json::array();
        for (const auto& node : tree.nodes) {
            json jn;
            jn["feature"] = node.feature;
            jn["threshold"] = node.threshold;
            jn["left"] = node.left;
            jn["right"] = node.right;
            jn["leaf"] = node.leaf_value;
            jnodes.push_back(std::move(jn));
        }
        jtrees.push_back(json{{"nodes", std::move(jnodes)}});
    }
    doc["trees"] = std::move(jtrees);
    return doc.dump(2);
}

ForestModel ForestModel::from_json_string(const std::string& text) {
    json doc = json::parse(text);
    if (doc.value("model", "") != "regression_forest") {
        throw EvalError(ErrorCode::BadValue, "not a regression forest model file");
    }
    ForestModel model;
    model.n_trees = doc.at("n_trees").get<int>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.feature_schema = doc.at("feature_schema").get<std::vector<std::string>>();
    model.target_schema = doc.at("target_schema").get<std::vector<std::string>>();
    model.standardize.means = doc.at("standardize").at("means").get<std::vector<double>>();
    model.standardize.stds = doc.at("standardize").at("stds").get<std::vector<double>>();
    for (const auto& jtree : doc.at("trees")) {
        Tree tree;
        for (const auto& jn : jtree.at("nodes")) {
            TreeNode node;
            node.feature = jn.at("feature").get<int>();
            node.threshold = jn.at("threshold").get<double>();
            node.left = jn.at("left").get<std::int32_t>();
            node.right = jn.at("right").get<std::int32_t>();
            node.leaf_value = jn.at("leaf").get<std::vector<double>>();
            tree.nodes.push_back(std::move(node));
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

std::string GaussianModel::to_json_string() const {
    json doc;
    doc["model"] = "gaussian";
    doc["mean"] = mean;
    doc["ridge_epsilon"] = ridge_epsilon;
    doc["ridge_value"] = ridge_value;
    doc["covariance"] = matrix_to_json(covariance);
    doc["precision"] = matrix_to_json(precision);
    return doc.dump(2);
}

GaussianModel GaussianModel::from_json_string(const std::string& text) {
    json doc = json::parse(text);
    if (doc.value("model", "") != "gaussian") {
        throw EvalError(ErrorCode::BadValue, "not a gaussian model file");
    }
    GaussianModel model;
    model.mean = doc.at("mean").get<std::vector<double>>();
    model.ridge_epsilon = doc.at("ridge_epsilon").get<double>();
    model.ridge_value = doc.at("ridge_value").get<double>();
    model.covariance = matrix_from_json(doc.at("covariance"));
    model.precision = matrix_from_json(doc.at("precision"));
    if (model.covariance.rows != model.mean.size() ||
        model.precision.rows != model.mean.size()) {
        throw EvalError(ErrorCode::BadValue, "model matrices do not match mean dimension");
    }
    return model;
}

}  // namespace fdeval
