#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fdeval/segmetrics.hpp"
#include "oracles.hpp"

using namespace fdeval;

namespace {

// 1x8 row map helper: voxel indices along x
std::vector<std::uint8_t> row_mask(std::initializer_list<int> on) {
    std::vector<std::uint8_t> mask(8, 0);
    for (int i : on) mask[static_cast<std::size_t>(i)] = 1;
    return mask;
}

LabelMap from_labels(const std::vector<std::int64_t>& dims, std::vector<std::int32_t> labels,
                     std::vector<std::int32_t> classes = {1}) {
    std::vector<double> spacing(dims.size(), 1.0);
    return LabelMap::exclusive(dims, spacing, std::move(classes), std::move(labels));
}

}  // namespace

TEST_CASE("dsc_binary identity, overlap, and disjoint cases") {
    auto p = row_mask({0, 1, 2, 3});
    CHECK(dsc_binary(p, p) == 1.0);
    CHECK(dsc_binary(row_mask({0, 1, 2, 3}), row_mask({2, 3, 4, 5})) == 0.5);
    CHECK(dsc_binary(row_mask({}), row_mask({0, 1, 2})) == 0.0);
    CHECK(dsc_binary(row_mask({}), row_mask({})) == 1.0);
    CHECK_THROWS_AS(dsc_binary(std::vector<std::uint8_t>(4, 0), std::vector<std::uint8_t>(5, 0)),
                    EvalError);
}

TEST_CASE("dsc_binary is symmetric on random masks") {
    std::mt19937_64 rng(42);
    for (int it = 0; it < 200; ++it) {
        auto a = oracles::random_mask(rng, 64);
        auto b = oracles::random_mask(rng, 64);
        CHECK(dsc_binary(a, b) == dsc_binary(b, a));
        double v = dsc_binary(a, b);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("mean_dsc averages per-class scores") {
    // class 1 identical, class 2 disjoint -> (1.0 + 0.0) / 2
    auto pred = from_labels({2, 4}, {1, 1, 0, 0, 2, 2, 0, 0}, {1, 2});
    auto gt = from_labels({2, 4}, {1, 1, 0, 0, 0, 0, 2, 2}, {1, 2});
    CHECK(mean_dsc(pred, gt) == 0.5);
    CHECK(mean_dsc(gt, gt) == 1.0);
}

TEST_CASE("mean_dsc matches the brute-force counting oracle on random 4x4x4 pairs") {
    std::mt19937_64 rng(7);
    std::vector<std::int32_t> classes = {1, 2};
    for (int it = 0; it < 100; ++it) {
        auto pred = oracles::random_label_map(rng, {4, 4, 4}, classes);
        auto gt = oracles::random_label_map(rng, {4, 4, 4}, classes);
        double expected = oracles::mean_dsc(pred.labels(), gt.labels(), classes);
        CHECK(std::abs(mean_dsc(pred, gt) - expected) <= 1e-12);
    }
}

TEST_CASE("generalized_dsc identity and single-class reduction") {
    auto gt = from_labels({2, 4}, {1, 1, 0, 0, 0, 0, 0, 1});
    CHECK(generalized_dsc(gt, gt) == 1.0);

    auto pred = from_labels({2, 4}, {1, 0, 0, 0, 0, 0, 1, 1});
    CHECK(generalized_dsc(pred, gt) ==
          dsc_binary(pred.class_mask(1), gt.class_mask(1)));

    auto empty = from_labels({2, 4}, std::vector<std::int32_t>(8, 0));
    CHECK(generalized_dsc(empty, empty) == 1.0);
}

TEST_CASE("generalized_dsc matches the weighted-sum oracle on random pairs") {
    std::mt19937_64 rng(11);
    std::vector<std::int32_t> classes = {1, 2};
    for (int it = 0; it < 100; ++it) {
        auto pred = oracles::random_label_map(rng, {4, 4}, classes);
        auto gt = oracles::random_label_map(rng, {4, 4}, classes);
        double expected = oracles::generalized_dsc(pred.labels(), gt.labels(), classes);
        CHECK(std::abs(generalized_dsc(pred, gt) - expected) <= 1e-12);
    }
}

TEST_CASE("nsd_binary handles identical, near, and far masks") {
    std::vector<std::int64_t> dims = {1, 6};
    std::vector<double> spacing = {1.0, 1.0};
    auto a = row_mask({1, 2});
    a.resize(6);
    std::vector<std::uint8_t> p(6, 0), g(6, 0);
    p[0] = 1;
    g[3] = 1;  // single voxels 3 units apart
    CHECK(nsd_binary(p, p, dims, spacing, 0.5) == 1.0);
    CHECK(nsd_binary(p, g, dims, spacing, 1.0) == 0.0);
    CHECK(nsd_binary(p, g, dims, spacing, 3.0) == 1.0);

    std::vector<std::uint8_t> empty(6, 0);
    CHECK(nsd_binary(empty, empty, dims, spacing, 1.0) == 1.0);
    CHECK(nsd_binary(p, empty, dims, spacing, 1.0) == 0.0);
    CHECK_THROWS_AS(nsd_binary(p, g, dims, spacing, 0.0), EvalError);
    CHECK_THROWS_AS(nsd_binary(p, g, dims, spacing, -1.0), EvalError);
}

TEST_CASE("nsd_binary respects anisotropic spacing") {
    // same voxel offset, but physical distance scaled by the axis spacing
    std::vector<std::int64_t> dims = {1, 6};
    std::vector<std::uint8_t> p(6, 0), g(6, 0);
    p[0] = 1;
    g[3] = 1;
    CHECK(nsd_binary(p, g, dims, {1.0, 2.0}, 3.0) == 0.0);  // 6 physical units apart
    CHECK(nsd_binary(p, g, dims, {1.0, 2.0}, 6.0) == 1.0);
}

TEST_CASE("nsd_binary matches the all-pairs boundary oracle on random 6x6 pairs") {
    std::mt19937_64 rng(13);
    for (int it = 0; it < 50; ++it) {
        auto p = oracles::random_mask(rng, 36, 0.4);
        auto g = oracles::random_mask(rng, 36, 0.4);
        double sy = 0.5 + oracles::uniform(rng);
        double sx = 0.5 + oracles::uniform(rng);
        double tol = 0.5 + 2.0 * oracles::uniform(rng);
        double expected = oracles::nsd_2d(p, g, 6, 6, sy, sx, tol);
        double got = nsd_binary(p, g, {6, 6}, {sy, sx}, tol);
        CHECK(std::abs(got - expected) <= 1e-9);
    }
}

TEST_CASE("compute_risk complements the metric exactly") {
    auto gt = from_labels({2, 4}, {1, 1, 0, 0, 0, 0, 0, 0});
    auto pred = from_labels({2, 4}, {0, 1, 1, 0, 0, 0, 0, 0});
    RiskSpec spec(RiskMetric::Dsc);
    CHECK(compute_risk(gt, gt, spec) == 0.0);

    auto disjoint = from_labels({2, 4}, {0, 0, 0, 0, 1, 1, 0, 0});
    CHECK(compute_risk(disjoint, gt, spec) == 1.0);

    CHECK(compute_risk(pred, gt, spec) + compute_metric(pred, gt, spec) == 1.0);

    std::mt19937_64 rng(3);
    for (int it = 0; it < 50; ++it) {
        auto a = oracles::random_label_map(rng, {4, 4}, {1, 2});
        auto b = oracles::random_label_map(rng, {4, 4}, {1, 2});
        for (auto metric : {RiskMetric::Dsc, RiskMetric::GeneralizedDsc}) {
            RiskSpec s(metric);
            CHECK(compute_risk(a, b, s) + compute_metric(a, b, s) == 1.0);
        }
    }
}

TEST_CASE("compute_risk honors class subsets") {
    auto pred = from_labels({2, 4}, {1, 1, 0, 0, 2, 2, 0, 0}, {1, 2});
    auto gt = from_labels({2, 4}, {1, 1, 0, 0, 0, 0, 2, 2}, {1, 2});
    RiskSpec spec(RiskMetric::Dsc);
    spec.class_subset = std::vector<std::int32_t>{1};
    CHECK(compute_risk(pred, gt, spec) == 0.0);
    spec.class_subset = std::vector<std::int32_t>{2};
    CHECK(compute_risk(pred, gt, spec) == 1.0);
    spec.class_subset = std::vector<std::int32_t>{9};
    CHECK_THROWS_AS(compute_risk(pred, gt, spec), EvalError);
}

TEST_CASE("probability maps validate their channel structure") {
    // Exclusive needs channel sums of one
    CHECK_THROWS_AS(
        ProbabilityMap({1, 2}, {1.0, 1.0}, LabelMode::Exclusive, {1}, {0.5, 0.5, 0.4, 0.5}),
        EvalError);
    CHECK_NOTHROW(
        ProbabilityMap({1, 2}, {1.0, 1.0}, LabelMode::Exclusive, {1}, {0.5, 0.7, 0.5, 0.3}));
    // Regions channels are unconstrained in sum but range checked
    CHECK_THROWS_AS(ProbabilityMap({1, 2}, {1.0, 1.0}, LabelMode::Regions, {1}, {1.2, 0.0}),
                    EvalError);
}

TEST_CASE("probs_to_prediction takes the argmax with ties to the lowest channel") {
    // one voxel, classes (bg, 1, 2), probs (0.2, 0.7, 0.1)
    ProbabilityMap probs({1, 1}, {1.0, 1.0}, LabelMode::Exclusive, {1, 2}, {0.2, 0.7, 0.1});
    CHECK(probs_to_prediction(probs).labels()[0] == 1);

    ProbabilityMap tie({1, 1}, {1.0, 1.0}, LabelMode::Exclusive, {1}, {0.5, 0.5});
    CHECK(probs_to_prediction(tie).labels()[0] == 0);

    ProbabilityMap region({1, 1}, {1.0, 1.0}, LabelMode::Regions, {1}, {0.5});
    CHECK(probs_to_prediction(region).region_channel(0)[0] == 1);
    ProbabilityMap region_low({1, 1}, {1.0, 1.0}, LabelMode::Regions, {1}, {0.49});
    CHECK(probs_to_prediction(region_low).region_channel(0)[0] == 0);
}

TEST_CASE("probs_to_confidence inverts normalized entropy") {
    ProbabilityMap flat({1, 1}, {1.0, 1.0}, LabelMode::Exclusive, {1}, {0.5, 0.5});
    CHECK(probs_to_confidence(flat).values()[0] == 0.0);

    ProbabilityMap peaked({1, 1}, {1.0, 1.0}, LabelMode::Exclusive, {1, 2}, {1.0, 0.0, 0.0});
    CHECK(probs_to_confidence(peaked).values()[0] == 1.0);

    // regions: per-region binary entropy, then the per-voxel minimum
    ProbabilityMap regions({1, 1}, {1.0, 1.0}, LabelMode::Regions, {1, 2}, {1.0, 0.5});
    CHECK(probs_to_confidence(regions).values()[0] == 0.0);
}

TEST_CASE("probs_to_confidence is invariant under channel permutation") {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 50; ++it) {
        double a = oracles::uniform(rng), b = oracles::uniform(rng), c = oracles::uniform(rng);
        double s = a + b + c;
        std::vector<double> p = {a / s, b / s, c / s};
        ProbabilityMap m1({1, 1}, {1.0, 1.0}, LabelMode::Exclusive, {1, 2},
                          {p[0], p[1], p[2]});
        ProbabilityMap m2({1, 1}, {1.0, 1.0}, LabelMode::Exclusive, {1, 2},
                          {p[2], p[0], p[1]});
        double c1 = probs_to_confidence(m1).values()[0];
        double c2 = probs_to_confidence(m2).values()[0];
        CHECK(std::abs(c1 - c2) <= 1e-12);
        CHECK(c1 >= 0.0);
        CHECK(c1 <= 1.0);
    }
}
