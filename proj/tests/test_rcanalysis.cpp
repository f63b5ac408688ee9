#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fdeval/rcanalysis.hpp"
#include "fdeval/stats.hpp"
#include "oracles.hpp"

using namespace fdeval;

namespace {

// the worked four-sample example: ascending risks with perfect ranking
const std::vector<double> kRisks = {0.1, 0.5, 0.7, 0.72};
const std::vector<double> kPerfect = {4.0, 3.0, 2.0, 1.0};

std::vector<double> random_distinct_risks(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> risks(n);
    for (auto& r : risks) r = oracles::uniform(rng);
    std::sort(risks.begin(), risks.end());
    // nudge exact duplicates apart; continuous draws make them measure-zero anyway
    for (std::size_t i = 1; i < n; ++i) {
        if (risks[i] == risks[i - 1]) risks[i] = std::nextafter(risks[i], 1.0);
    }
    return risks;
}

}  // namespace

TEST_CASE("rc_curve on the worked example") {
    auto curve = rc_curve(kRisks, kPerfect);
    REQUIRE(curve.point_count() == 4);
    CHECK(curve.coverage == std::vector<double>{0.25, 0.5, 0.75, 1.0});
    CHECK(curve.selective_risk[0] == 0.1);
    CHECK(std::abs(curve.selective_risk[1] - 0.3) <= 1e-15);
    CHECK(std::abs(curve.selective_risk[2] - 1.3 / 3.0) <= 1e-15);
    CHECK(std::abs(curve.selective_risk[3] - 0.505) <= 1e-15);
    CHECK(curve.group_sizes == std::vector<std::size_t>{1, 1, 1, 1});
}

TEST_CASE("rc_curve groups tied confidences atomically") {
    auto curve = rc_curve(kRisks, std::vector<double>{1.0, 1.0, 1.0, 1.0});
    REQUIRE(curve.point_count() == 1);
    CHECK(curve.coverage[0] == 1.0);
    CHECK(curve.selective_risk[0] == aurc_random(kRisks));

    auto single = rc_curve(std::vector<double>{0.3}, std::vector<double>{0.0});
    REQUIRE(single.point_count() == 1);
    CHECK(single.coverage[0] == 1.0);
    CHECK(single.selective_risk[0] == 0.3);
}

TEST_CASE("rc_curve validates its inputs") {
    CHECK_THROWS_AS(rc_curve(std::vector<double>{}, std::vector<double>{}), EvalError);
    CHECK_THROWS_AS(rc_curve(std::vector<double>{0.1}, std::vector<double>{1.0, 2.0}),
                    EvalError);
    CHECK_THROWS_AS(rc_curve(std::vector<double>{1.2}, std::vector<double>{1.0}), EvalError);
    CHECK_THROWS_AS(rc_curve(std::vector<double>{-0.1}, std::vector<double>{1.0}), EvalError);
}

TEST_CASE("rc_curve ends at full coverage with the overall mean risk") {
    std::mt19937_64 rng(83);
    for (int it = 0; it < 50; ++it) {
        std::size_t n = 1 + rng() % 30;
        std::vector<double> risks(n), confs(n);
        for (auto& r : risks) r = oracles::uniform(rng);
        for (auto& c : confs) c = oracles::uniform(rng) * 10.0 - 5.0;
        auto curve = rc_curve(risks, confs);
        CHECK(curve.coverage.back() == 1.0);
        CHECK(std::abs(curve.selective_risk.back() - aurc_random(risks)) <= 1e-12);
        CHECK(std::is_sorted(curve.coverage.begin(), curve.coverage.end()));
        for (double r : curve.selective_risk) {
            CHECK(r >= 0.0);
            CHECK(r <= 1.0);
        }
    }
}

TEST_CASE("rc_curve is independent of the pair ordering") {
    std::mt19937_64 rng(89);
    std::vector<double> risks(12), confs(12);
    for (auto& r : risks) r = oracles::uniform(rng);
    for (auto& c : confs) c = oracles::uniform(rng);
    auto base = rc_curve(risks, confs);
    std::vector<std::size_t> perm(12);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (int it = 0; it < 20; ++it) {
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> r2(12), c2(12);
        for (std::size_t i = 0; i < 12; ++i) {
            r2[i] = risks[perm[i]];
            c2[i] = confs[perm[i]];
        }
        auto shuffled = rc_curve(r2, c2);
        CHECK(shuffled.coverage == base.coverage);
        for (std::size_t g = 0; g < base.point_count(); ++g) {
            CHECK(std::abs(shuffled.selective_risk[g] - base.selective_risk[g]) <= 1e-12);
        }
    }
}

TEST_CASE("aurc on the worked example matches the cumulative-mean oracle") {
    double expected = (0.1 + 0.3 + 1.3 / 3.0 + 0.505) / 4.0;
    double got = aurc(rc_curve(kRisks, kPerfect));
    CHECK(std::abs(got - expected) <= 1e-15);
    CHECK(std::abs(got - 0.3345833333333333) <= 1e-9);
    CHECK(std::abs(oracles::aurc_cumulative_means(kRisks, kPerfect) - got) <= 1e-15);
}

TEST_CASE("aurc of constant risks equals that constant") {
    std::vector<double> risks(7, 0.4);
    std::vector<double> confs = {7, 1, 4, 2, 6, 3, 5};
    CHECK(std::abs(aurc(rc_curve(risks, confs)) - 0.4) <= 1e-15);
}

TEST_CASE("a single tie group integrates to the mean risk") {
    std::vector<double> risks = {0.2, 0.6, 0.7};
    auto curve = rc_curve(risks, std::vector<double>{1.0, 1.0, 1.0});
    CHECK(aurc(curve) == aurc_random(risks));
}

TEST_CASE("aurc_random and aurc_optimal on the stated examples") {
    CHECK(aurc_random(kRisks) == 0.505);
    CHECK(aurc_random(std::vector<double>{0.0, 0.0}) == 0.0);
    CHECK(aurc_random(std::vector<double>{0.37}) == 0.37);
    CHECK_THROWS_AS(aurc_random(std::vector<double>{}), EvalError);

    CHECK(std::abs(aurc_optimal(kRisks) - (0.1 + 0.3 + 1.3 / 3.0 + 0.505) / 4.0) <= 1e-15);
    CHECK(aurc_optimal(std::vector<double>{0.0, 1.0}) == 0.25);
    std::vector<double> constant(5, 0.6);
    CHECK(std::abs(aurc_optimal(constant) - 0.6) <= 1e-15);
}

TEST_CASE("naurc endpoints and degeneracy") {
    CHECK(naurc(0.2, 0.5, 0.2) == 0.0);
    CHECK(naurc(0.5, 0.5, 0.2) == 1.0);
    double opt = aurc_optimal(kRisks);
    CHECK(naurc(aurc(rc_curve(kRisks, kPerfect)), aurc_random(kRisks), opt) == 0.0);
    CHECK_THROWS_AS(naurc(0.4, 0.4, 0.4), EvalError);
}

TEST_CASE("operating_point picks the widest qualifying coverage") {
    auto curve = rc_curve(kRisks, kPerfect);
    CHECK(operating_point(curve, 0.1) == 0.25);
    CHECK(operating_point(curve, 1.0) == 1.0);
    CHECK(operating_point(curve, 0.05) == 0.0);
}

TEST_CASE("optimal bounds any ordering which bounds the anti-optimal ordering") {
    std::mt19937_64 rng(97);
    for (int it = 0; it < 100; ++it) {
        std::size_t n = 2 + rng() % 11;
        auto risks = random_distinct_risks(rng, n);
        std::vector<double> random_conf(n);
        for (auto& c : random_conf) c = oracles::uniform(rng);
        double opt = aurc_optimal(risks);
        double any = aurc(rc_curve(risks, random_conf));
        std::vector<double> anti(n);
        for (std::size_t i = 0; i < n; ++i) anti[i] = risks[i];
        double worst = aurc(rc_curve(risks, anti));
        CHECK(opt <= any + 1e-12);
        CHECK(any <= worst + 1e-12);
    }
}

TEST_CASE("aurc_optimal equals the exhaustive permutation minimum for small n") {
    std::mt19937_64 rng(101);
    for (int it = 0; it < 20; ++it) {
        std::size_t n = 2 + rng() % 6;
        auto risks = random_distinct_risks(rng, n);
        CHECK(std::abs(aurc_optimal(risks) - oracles::aurc_exhaustive_min(risks)) <= 1e-12);
    }
}

TEST_CASE("aurc is invariant under strictly monotone confidence transforms") {
    std::mt19937_64 rng(103);
    for (int it = 0; it < 50; ++it) {
        std::size_t n = 2 + rng() % 20;
        std::vector<double> risks(n), confs(n);
        for (auto& r : risks) r = oracles::uniform(rng);
        for (auto& c : confs) c = oracles::uniform(rng) * 4.0 - 2.0;
        double base = aurc(rc_curve(risks, confs));
        std::vector<double> warped(n);
        for (std::size_t i = 0; i < n; ++i) warped[i] = std::exp(confs[i]) + 3.0;
        CHECK(std::abs(aurc(rc_curve(risks, warped)) - base) <= 1e-12);
    }
}

TEST_CASE("low-risk confidence swaps move AURC more than high-risk swaps") {
    // perfect ranking, then swap the confidences of the two lowest-risk
    // samples vs the two highest-risk samples
    double base = aurc(rc_curve(kRisks, kPerfect));
    double low_swap = aurc(rc_curve(kRisks, std::vector<double>{3.0, 4.0, 2.0, 1.0}));
    double high_swap = aurc(rc_curve(kRisks, std::vector<double>{4.0, 3.0, 1.0, 2.0}));
    CHECK(std::abs(low_swap - base) > std::abs(high_swap - base));

    // while Spearman cannot tell the two swaps apart
    double s_base = spearman(kPerfect, kRisks);
    double s_low = spearman(std::vector<double>{3.0, 4.0, 2.0, 1.0}, kRisks);
    double s_high = spearman(std::vector<double>{4.0, 3.0, 1.0, 2.0}, kRisks);
    CHECK(std::abs(std::abs(s_low - s_base) - std::abs(s_high - s_base)) <= 1e-12);
}
