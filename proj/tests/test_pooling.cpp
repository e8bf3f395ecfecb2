#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "metacorr/datasets.hpp"
#include "metacorr/pooling.hpp"

namespace mc = metacorr;

TEST_CASE("to_z_scale transforms r and n", "[pooling]") {
    const std::vector<mc::StudySummary> studies{{0.5, 103}, {0.0, 7}, {-0.3, 28}};
    const auto zs = mc::to_z_scale(studies);
    REQUIRE(zs.size() == 3);
    REQUIRE(zs[0].z == Catch::Approx(0.5493061443340549).margin(1e-14));
    REQUIRE(zs[0].var_z == Catch::Approx(0.01).margin(1e-15));
    REQUIRE(zs[0].n == 103);
    REQUIRE(zs[1].z == 0.0);
    REQUIRE(zs[1].var_z == Catch::Approx(0.25).margin(1e-15));
    REQUIRE(zs[2].z == Catch::Approx(std::atanh(-0.3)).margin(1e-14));
}

TEST_CASE("to_z_scale clamps perfect correlations", "[pooling]") {
    const std::vector<mc::StudySummary> studies{{1.0, 12}};
    const auto zs = mc::to_z_scale(studies);
    REQUIRE(zs[0].z == Catch::Approx(std::atanh(0.999)).margin(1e-12));
    REQUIRE(zs[0].z == Catch::Approx(3.8002011).margin(1e-6));
    REQUIRE(zs[0].var_z == Catch::Approx(1.0 / 9.0).margin(1e-15));
}

TEST_CASE("to_z_scale rejects undersized studies", "[pooling]") {
    const std::vector<mc::StudySummary> studies{{0.5, 103}, {0.2, 3}};
    REQUIRE_THROWS_WITH(mc::to_z_scale(studies),
                        Catch::Matchers::ContainsSubstring("study 2"));
}

TEST_CASE("sj_tau2 matches hand-derived oracles", "[pooling]") {
    // Three studies, z = (0, 0.5, 1), var = 0.1 each.
    // Unweighted tau2_0 = 1/6; weights w = tau2_0/(v + tau2_0) = 0.625 each;
    // mu = 0.5; tau2 = (1/2) * 0.625 * 0.5 = 0.15625.
    std::vector<mc::ZStudy> zs{{0.0, 0.1, 13}, {0.5, 0.1, 13}, {1.0, 0.1, 13}};
    REQUIRE(mc::sj_tau2(zs) == Catch::Approx(0.15625).margin(1e-12));

    // Two studies, z = (0, 1), var = 0.1 each.
    // tau2_0 = 1/4; w = 0.25/0.35 = 5/7; mu = 0.5; tau2 = 2*(5/7)*0.25 = 5/14.
    std::vector<mc::ZStudy> z2{{0.0, 0.1, 13}, {1.0, 0.1, 13}};
    REQUIRE(mc::sj_tau2(z2) == Catch::Approx(5.0 / 14.0).margin(1e-12));
}

TEST_CASE("sj_tau2 is zero for identical effects", "[pooling]") {
    std::vector<mc::ZStudy> zs{{0.4, 0.05, 23}, {0.4, 0.01, 103}, {0.4, 0.2, 8}};
    REQUIRE(mc::sj_tau2(zs) == 0.0);
}

TEST_CASE("sj_tau2 is invariant under permutation", "[pooling]") {
    std::vector<mc::ZStudy> zs{{0.1, 0.02, 53}, {0.6, 0.05, 23}, {-0.2, 0.01, 103},
                               {0.9, 0.11, 12}, {0.3, 0.04, 28}};
    const double base = mc::sj_tau2(zs);
    std::vector<mc::ZStudy> perm{zs[3], zs[0], zs[4], zs[2], zs[1]};
    REQUIRE(mc::sj_tau2(perm) == Catch::Approx(base).margin(1e-13));
}

TEST_CASE("sj_tau2 scales quadratically with the effect scale", "[pooling]") {
    std::vector<mc::ZStudy> zs{{0.1, 0.02, 53}, {0.6, 0.05, 23}, {-0.2, 0.01, 103},
                               {0.9, 0.11, 12}};
    const double base = mc::sj_tau2(zs);
    const double c = 2.5;
    std::vector<mc::ZStudy> scaled = zs;
    for (auto& z : scaled) {
        z.z *= c;
        z.var_z *= c * c;
    }
    REQUIRE(mc::sj_tau2(scaled) == Catch::Approx(c * c * base).epsilon(1e-12));
}

TEST_CASE("sj_tau2 requires two studies", "[pooling]") {
    std::vector<mc::ZStudy> zs{{0.4, 0.05, 23}};
    REQUIRE_THROWS_AS(mc::sj_tau2(zs), std::invalid_argument);
}

TEST_CASE("heterogeneity of the coping-strategies meta-analysis", "[pooling]") {
    const auto ds = mc::builtin_molloy2014();
    const auto studies = mc::study_summaries(ds);
    REQUIRE(studies.size() == 16);
    REQUIRE(mc::sj_tau2(mc::to_z_scale(studies)) == Catch::Approx(0.012994).margin(1e-5));
    REQUIRE(mc::sj_tau2_r(studies) == Catch::Approx(0.012453).margin(1e-5));
}

TEST_CASE("iv_pooled matches a hand-computed weighted mean", "[pooling]") {
    // z = (0.2, 0.4), n = (103, 53): weights 100 and 50, mean = 4/15.
    std::vector<mc::ZStudy> zs{{0.2, 0.01, 103}, {0.4, 0.02, 53}};
    const auto pooled = mc::iv_pooled(zs, 0.0);
    REQUIRE(pooled.z_bar == Catch::Approx(4.0 / 15.0).margin(1e-14));
    REQUIRE(pooled.k == 2);
    REQUIRE(pooled.tau2 == 0.0);
    REQUIRE(pooled.weights[0] == Catch::Approx(100.0).margin(1e-10));
    REQUIRE(pooled.weights[1] == Catch::Approx(50.0).margin(1e-10));
}

TEST_CASE("iv_pooled shifts toward the unweighted mean as tau2 grows", "[pooling]") {
    std::vector<mc::ZStudy> zs{{0.2, 0.01, 103}, {0.4, 0.02, 53}};
    const auto fixed = mc::iv_pooled(zs, 0.0);
    const auto wide = mc::iv_pooled(zs, 100.0);
    const double unweighted = 0.3;
    REQUIRE(std::abs(wide.z_bar - unweighted) < std::abs(fixed.z_bar - unweighted));
    REQUIRE(wide.z_bar == Catch::Approx(unweighted).margin(1e-4));
    REQUIRE_THROWS_AS(mc::iv_pooled(zs, -0.01), std::invalid_argument);
    REQUIRE_THROWS_AS(mc::iv_pooled(std::vector<mc::ZStudy>{}, 0.0), std::invalid_argument);
}

TEST_CASE("hs_pooled_r is the sample-size weighted mean", "[pooling]") {
    const std::vector<mc::StudySummary> studies{{0.1, 100}, {0.5, 300}};
    REQUIRE(mc::hs_pooled_r(studies) == Catch::Approx(0.4).margin(1e-14));
    REQUIRE_THROWS_AS(mc::hs_pooled_r({}), std::invalid_argument);
}

TEST_CASE("pooled_ipd_ci pins and clamps", "[pooling]") {
    const auto [lo, hi] = mc::pooled_ipd_ci(0.0, 100, 0.05);
    REQUIRE(lo == Catch::Approx(-0.19599639845400543).margin(1e-9));
    REQUIRE(hi == Catch::Approx(0.19599639845400543).margin(1e-9));

    const auto [lo2, hi2] = mc::pooled_ipd_ci(0.999, 10, 0.05);
    REQUIRE(hi2 <= 1.0);
    REQUIRE(lo2 <= 0.999);

    REQUIRE_THROWS_AS(mc::pooled_ipd_ci(0.0, 3, 0.05), std::invalid_argument);
    REQUIRE_THROWS_AS(mc::pooled_ipd_ci(0.0, 100, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(mc::pooled_ipd_ci(0.0, 100, 1.0), std::invalid_argument);
}
