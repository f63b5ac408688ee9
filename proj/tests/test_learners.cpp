#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fdeval/learners.hpp"
#include "oracles.hpp"

using namespace fdeval;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

std::vector<std::string> names(std::size_t n, const std::string& prefix) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

}  // namespace

TEST_CASE("standardize_fit_apply computes population z-scores") {
    auto [params, z] = standardize_fit_apply(from_rows({{1.0}, {3.0}}));
    CHECK(params.means[0] == 2.0);
    CHECK(params.stds[0] == 1.0);
    CHECK(z.at(0, 0) == -1.0);
    CHECK(z.at(1, 0) == 1.0);
}

TEST_CASE("standardize_fit_apply guards zero-variance columns") {
    auto [params, z] = standardize_fit_apply(from_rows({{5.0, 1.0}, {5.0, 2.0}, {5.0, 3.0}}));
    CHECK(params.stds[0] == 1.0);
    CHECK(z.at(0, 0) == 0.0);
    CHECK(z.at(1, 0) == 0.0);
    CHECK(z.at(2, 0) == 0.0);
}

TEST_CASE("standardize_fit_apply is idempotent on standardized columns") {
    std::mt19937_64 rng(3);
    std::vector<std::vector<double>> rows(20, std::vector<double>(1));
    for (auto& r : rows) r[0] = oracles::uniform(rng) * 4.0 - 2.0;
    auto [p1, z1] = standardize_fit_apply(from_rows(rows));
    Matrix m1 = z1;
    auto [p2, z2] = standardize_fit_apply(m1);
    CHECK(std::abs(p2.means[0]) <= 1e-12);
    CHECK(std::abs(p2.stds[0] - 1.0) <= 1e-12);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(std::abs(z2.at(i, 0) - z1.at(i, 0)) <= 1e-12);
    }
}

TEST_CASE("standardize_fit_apply needs two rows") {
    CHECK_THROWS_AS(standardize_fit_apply(from_rows({{1.0}})), EvalError);
}

TEST_CASE("constant targets give constant forest predictions") {
    std::mt19937_64 rng(17);
    std::vector<std::vector<double>> x(100, std::vector<double>(5));
    for (auto& row : x) {
        for (auto& v : row) v = oracles::uniform(rng);
    }
    Matrix targets(100, 2);
    for (std::size_t i = 0; i < 100; ++i) {
        targets.at(i, 0) = 0.9;
        targets.at(i, 1) = 0.9;
    }
    auto model = rf_fit(from_rows(x), targets, names(5, "f"), names(2, "t"),
                        RfOptions{100, true, 123});
    FeatureVector probe(x[0], names(5, "f"));
    CHECK(rf_confidence(model, probe) == 0.9);
}

TEST_CASE("a single unbagged tree memorizes distinct rows") {
    std::mt19937_64 rng(19);
    std::vector<std::vector<double>> x;
    Matrix targets(30, 2);
    for (std::size_t i = 0; i < 30; ++i) {
        x.push_back({oracles::uniform(rng), oracles::uniform(rng), oracles::uniform(rng),
                     oracles::uniform(rng), oracles::uniform(rng)});
        targets.at(i, 0) = oracles::uniform(rng);
        targets.at(i, 1) = oracles::uniform(rng);
    }
    auto model =
        rf_fit(from_rows(x), targets, names(5, "f"), names(2, "t"), RfOptions{1, false, 0});
    for (std::size_t i = 0; i < 30; ++i) {
        auto pred = rf_predict(model, FeatureVector(x[i], names(5, "f")));
        CHECK(pred[0] == targets.at(i, 0));
        CHECK(pred[1] == targets.at(i, 1));
    }
}

TEST_CASE("forest fits are deterministic in the seed") {
    std::mt19937_64 rng(23);
    std::vector<std::vector<double>> x(40, std::vector<double>(5));
    Matrix targets(40, 3);
    for (std::size_t i = 0; i < 40; ++i) {
        for (auto& v : x[i]) v = oracles::uniform(rng);
        for (std::size_t t = 0; t < 3; ++t) targets.at(i, t) = oracles::uniform(rng);
    }
    auto a = rf_fit(from_rows(x), targets, names(5, "f"), names(3, "t"), RfOptions{20, true, 7});
    auto b = rf_fit(from_rows(x), targets, names(5, "f"), names(3, "t"), RfOptions{20, true, 7});
    CHECK(a.to_json_string() == b.to_json_string());
    auto c = rf_fit(from_rows(x), targets, names(5, "f"), names(3, "t"), RfOptions{20, true, 8});
    CHECK(a.to_json_string() != c.to_json_string());
}

TEST_CASE("forest predictions stay within the training target range") {
    std::mt19937_64 rng(29);
    std::vector<std::vector<double>> x(50, std::vector<double>(5));
    Matrix targets(50, 2);
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
        for (auto& v : x[i]) v = oracles::uniform(rng);
        for (std::size_t t = 0; t < 2; ++t) {
            double v = oracles::uniform(rng);
            targets.at(i, t) = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    auto model =
        rf_fit(from_rows(x), targets, names(5, "f"), names(2, "t"), RfOptions{30, true, 5});
    for (int probe = 0; probe < 20; ++probe) {
        std::vector<double> q(5);
        for (auto& v : q) v = oracles::uniform(rng) * 3.0 - 1.0;
        double kappa = rf_confidence(model, FeatureVector(q, names(5, "f")));
        CHECK(kappa >= lo);
        CHECK(kappa <= hi);
    }
}

TEST_CASE("rf_confidence averages the per-class targets only") {
    // two class targets with distinct constants plus an aggregate target
    std::vector<std::vector<double>> x(10, std::vector<double>(5));
    std::mt19937_64 rng(31);
    for (auto& row : x) {
        for (auto& v : row) v = oracles::uniform(rng);
    }
    Matrix targets(10, 3);
    for (std::size_t i = 0; i < 10; ++i) {
        targets.at(i, 0) = 0.8;
        targets.at(i, 1) = 0.6;
        targets.at(i, 2) = 0.1;  // aggregate target must not enter kappa
    }
    auto model =
        rf_fit(from_rows(x), targets, names(5, "f"), names(3, "t"), RfOptions{10, true, 2});
    double kappa = rf_confidence(model, FeatureVector(x[0], names(5, "f")));
    CHECK(kappa == 0.7);
}

TEST_CASE("forest guards its inputs") {
    Matrix x(3, 5), y(3, 1);
    CHECK_THROWS_AS(rf_fit(x, y, names(5, "f"), names(1, "t"), RfOptions{}), EvalError);
    Matrix x2(6, 5), y2(6, 1);
    x2.at(0, 0) = std::nan("");
    CHECK_THROWS_AS(rf_fit(x2, y2, names(5, "f"), names(1, "t"), RfOptions{}), EvalError);

    Matrix x3(6, 5), y3(6, 1);
    auto model = rf_fit(x3 /*constant*/, y3, names(5, "f"), names(1, "t"), RfOptions{2, true, 0});
    CHECK_THROWS_AS(rf_predict(model, FeatureVector({1, 2, 3}, names(3, "f"))), EvalError);
}

TEST_CASE("forest model JSON round-trips") {
    std::mt19937_64 rng(37);
    std::vector<std::vector<double>> x(12, std::vector<double>(5));
    Matrix targets(12, 2);
    for (std::size_t i = 0; i < 12; ++i) {
        for (auto& v : x[i]) v = oracles::uniform(rng);
        targets.at(i, 0) = oracles::uniform(rng);
        targets.at(i, 1) = oracles::uniform(rng);
    }
    auto model =
        rf_fit(from_rows(x), targets, names(5, "f"), names(2, "t"), RfOptions{5, true, 1});
    auto restored = ForestModel::from_json_string(model.to_json_string());
    CHECK(restored.to_json_string() == model.to_json_string());
    FeatureVector probe(x[3], names(5, "f"));
    CHECK(rf_predict(restored, probe) == rf_predict(model, probe));
}

TEST_CASE("gaussian fit at a single point is ridge-only") {
    auto model = mahalanobis_fit(from_rows({{2.0, -1.0}, {2.0, -1.0}, {2.0, -1.0}}), 1e-6);
    CHECK(model.mean == std::vector<double>{2.0, -1.0});
    CHECK(model.covariance.at(0, 0) == 0.0);
    CHECK(model.covariance.at(1, 1) == 0.0);
    CHECK(model.ridge_value == 1e-6);
    CHECK(mahalanobis_distance(model, {2.0, -1.0}) == 0.0);
    CHECK(mahalanobis_confidence(model, {2.0, -1.0}) == 0.0);
}

TEST_CASE("gaussian moments match an independent loop on a fixed sample") {
    std::mt19937_64 rng(41);
    std::size_t n = 400;
    std::vector<std::vector<double>> rows(n, std::vector<double>(2));
    for (auto& r : rows) {
        // sum of uniforms, centered: axis-aligned with equal variances
        double a = 0.0, b = 0.0;
        for (int k = 0; k < 12; ++k) {
            a += oracles::uniform(rng);
            b += oracles::uniform(rng);
        }
        r[0] = a - 6.0;
        r[1] = b - 6.0;
    }
    auto model = mahalanobis_fit(from_rows(rows), 1e-9);

    // straightforward two-pass sample moments
    double m0 = 0, m1 = 0;
    for (const auto& r : rows) {
        m0 += r[0];
        m1 += r[1];
    }
    m0 /= static_cast<double>(n);
    m1 /= static_cast<double>(n);
    double c00 = 0, c01 = 0, c11 = 0;
    for (const auto& r : rows) {
        c00 += (r[0] - m0) * (r[0] - m0);
        c01 += (r[0] - m0) * (r[1] - m1);
        c11 += (r[1] - m1) * (r[1] - m1);
    }
    c00 /= static_cast<double>(n - 1);
    c01 /= static_cast<double>(n - 1);
    c11 /= static_cast<double>(n - 1);

    CHECK(std::abs(model.mean[0] - m0) <= 1e-12);
    CHECK(std::abs(model.mean[1] - m1) <= 1e-12);
    CHECK(std::abs(model.covariance.at(0, 0) - c00) <= 1e-10);
    CHECK(std::abs(model.covariance.at(0, 1) - c01) <= 1e-10);
    CHECK(std::abs(model.covariance.at(1, 1) - c11) <= 1e-10);

    // 12 uniforms sum to variance 1; the sample covariance should be close
    // to the identity at this sample size
    CHECK(std::abs(model.covariance.at(0, 0) - 1.0) < 0.2);
    CHECK(std::abs(model.covariance.at(1, 1) - 1.0) < 0.2);
    CHECK(std::abs(model.covariance.at(0, 1)) < 0.2);

    auto again = mahalanobis_fit(from_rows(rows), 1e-9);
    CHECK(again.to_json_string() == model.to_json_string());
}

TEST_CASE("mahalanobis distance reduces to Euclidean under identity covariance") {
    GaussianModel model;
    model.mean = {0.0, 0.0};
    model.covariance = Matrix(2, 2);
    model.precision = Matrix(2, 2);
    model.covariance.at(0, 0) = model.covariance.at(1, 1) = 1.0;
    model.precision.at(0, 0) = model.precision.at(1, 1) = 1.0;
    CHECK(mahalanobis_distance(model, {3.0, 4.0}) == 5.0);
    CHECK(mahalanobis_confidence(model, {3.0, 4.0}) == -5.0);
    CHECK_THROWS_AS(mahalanobis_distance(model, {1.0, 2.0, 3.0}), EvalError);
}

TEST_CASE("scaling one axis variance by 4 halves its distance contribution") {
    GaussianModel model;
    model.mean = {0.0, 0.0};
    model.covariance = Matrix(2, 2);
    model.precision = Matrix(2, 2);
    model.covariance.at(0, 0) = 1.0;
    model.covariance.at(1, 1) = 4.0;
    model.precision.at(0, 0) = 1.0;
    model.precision.at(1, 1) = 0.25;
    CHECK(mahalanobis_distance(model, {0.0, 2.0}) == 1.0);
    CHECK(mahalanobis_distance(model, {2.0, 0.0}) == 2.0);
}

TEST_CASE("mahalanobis distance is affine invariant") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 60, d = 3;
        std::vector<std::vector<double>> rows(n, std::vector<double>(d));
        for (auto& r : rows) {
            for (auto& v : r) v = oracles::uniform(rng) * 2.0 - 1.0;
        }
        // random invertible map A (retry until well conditioned) and offset b
        std::vector<std::vector<double>> a(d, std::vector<double>(d));
        double det = 0.0;
        do {
            for (auto& row : a) {
                for (auto& v : row) v = oracles::uniform(rng) * 2.0 - 1.0;
            }
            det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                  a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                  a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        } while (std::abs(det) < 0.3);
        std::vector<double> b = {oracles::uniform(rng), oracles::uniform(rng),
                                 oracles::uniform(rng)};
        auto apply = [&](const std::vector<double>& x) {
            std::vector<double> y(d, 0.0);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) y[i] += a[i][j] * x[j];
                y[i] += b[i];
            }
            return y;
        };
        std::vector<std::vector<double>> mapped(n);
        for (std::size_t i = 0; i < n; ++i) mapped[i] = apply(rows[i]);

        auto m1 = mahalanobis_fit(from_rows(rows), 1e-12);
        auto m2 = mahalanobis_fit(from_rows(mapped), 1e-12);
        std::vector<double> q = {oracles::uniform(rng), oracles::uniform(rng),
                                 oracles::uniform(rng)};
        double d1 = mahalanobis_distance(m1, q);
        double d2 = mahalanobis_distance(m2, apply(q));
        CHECK(std::abs(d1 - d2) <= 1e-6);
    }
}

TEST_CASE("gaussian fit guards its inputs") {
    CHECK_THROWS_AS(mahalanobis_fit(from_rows({{1.0, 2.0}}), 1e-6), EvalError);
    CHECK_THROWS_AS(mahalanobis_fit(from_rows({{1.0, std::nan("")}, {2.0, 1.0}}), 1e-6),
                    EvalError);
}

TEST_CASE("gaussian model JSON round-trips") {
    auto model = mahalanobis_fit(from_rows({{1.0, 2.0}, {2.0, 4.0}, {0.0, 1.0}, {3.0, 0.0}}),
                                 1e-6);
    auto restored = GaussianModel::from_json_string(model.to_json_string());
    CHECK(restored.to_json_string() == model.to_json_string());
    CHECK(mahalanobis_distance(restored, {1.5, 1.5}) ==
          mahalanobis_distance(model, {1.5, 1.5}));
}
