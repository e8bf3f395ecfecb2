#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "metacorr/special.hpp"

using namespace metacorr;

TEST_CASE("log_gamma matches known values") {
    CHECK(std::fabs(log_gamma(1.0)) < 1e-14);
    CHECK(std::fabs(log_gamma(2.0)) < 1e-14);
    CHECK(log_gamma(0.5) == Catch::Approx(0.5 * std::log(kPi)).epsilon(1e-13));
    CHECK(log_gamma(5.0) == Catch::Approx(std::log(24.0)).epsilon(1e-13));
    CHECK(log_gamma(10.5) == Catch::Approx(std::log(1133278.3889487855673)).epsilon(1e-12));
}

TEST_CASE("log_gamma satisfies the recurrence") {
    for (double x : {0.1, 0.7, 1.3, 2.9, 7.5, 33.0, 140.25}) {
        const double lhs = log_gamma(x + 1.0);
        const double rhs = std::log(x) + log_gamma(x);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("log_gamma rejects the nonpositive domain") {
    CHECK_THROWS(log_gamma(0.0));
    CHECK_THROWS(log_gamma(-3.5));
}

TEST_CASE("normal_cdf anchors") {
    CHECK(normal_cdf(0.0) == Catch::Approx(0.5).margin(1e-15));
    CHECK(normal_cdf(1.959963984540054) == Catch::Approx(0.975).margin(1e-12));
    CHECK(normal_cdf(-1.959963984540054) == Catch::Approx(0.025).margin(1e-12));
    for (double x : {0.3, 1.1, 2.7}) {
        CHECK(normal_cdf(x) + normal_cdf(-x) == Catch::Approx(1.0).margin(1e-14));
    }
}

TEST_CASE("normal_quantile inverts normal_cdf") {
    CHECK(normal_quantile(0.975) == Catch::Approx(1.959963984540054).margin(1e-9));
    CHECK(normal_quantile(0.5) == Catch::Approx(0.0).margin(1e-12));
    for (double p = 0.001; p < 0.9995; p += 0.0271) {
        const double x = normal_quantile(p);
        CHECK(normal_cdf(x) == Catch::Approx(p).margin(1e-12));
    }
    for (double x = -5.0; x <= 5.0; x += 0.37) {
        CHECK(normal_quantile(normal_cdf(x)) == Catch::Approx(x).margin(1e-8));
    }
    CHECK_THROWS(normal_quantile(0.0));
    CHECK_THROWS(normal_quantile(1.0));
}

TEST_CASE("incomplete_beta closed forms") {
    for (double x = 0.05; x < 1.0; x += 0.1) {
        CHECK(incomplete_beta(1.0, 1.0, x) == Catch::Approx(x).margin(1e-13));
        CHECK(incomplete_beta(1.0, 3.0, x) ==
              Catch::Approx(1.0 - std::pow(1.0 - x, 3.0)).margin(1e-13));
        CHECK(incomplete_beta(2.0, 2.0, x) ==
              Catch::Approx(x * x * (3.0 - 2.0 * x)).margin(1e-13));
        CHECK(incomplete_beta(2.5, 1.7, x) + incomplete_beta(1.7, 2.5, 1.0 - x) ==
              Catch::Approx(1.0).margin(1e-13));
    }
    CHECK(incomplete_beta(4.0, 9.0, 0.0) == 0.0);
    CHECK(incomplete_beta(4.0, 9.0, 1.0) == 1.0);
}

TEST_CASE("t_cdf closed forms at one and two degrees of freedom") {
    for (double t = -6.0; t <= 6.0; t += 0.51) {
        CHECK(t_cdf(t, 1) == Catch::Approx(0.5 + std::atan(t) / kPi).margin(1e-12));
        CHECK(t_cdf(t, 2) ==
              Catch::Approx(0.5 + t / (2.0 * std::sqrt(2.0 + t * t))).margin(1e-12));
    }
}

TEST_CASE("t_quantile closed forms and tables") {
    CHECK(t_quantile(0.975, 1) == Catch::Approx(std::tan(kPi * 0.475)).epsilon(1e-10));
    {
        const double p = 0.9;
        const double u = 2.0 * p - 1.0;
        CHECK(t_quantile(p, 2) ==
              Catch::Approx(u * std::sqrt(2.0 / (1.0 - u * u))).epsilon(1e-10));
    }
    CHECK(t_quantile(0.975, 4) == Catch::Approx(2.7764451051977987).epsilon(1e-9));
    CHECK(t_quantile(0.975, 15) == Catch::Approx(2.1314495455597570).epsilon(1e-9));
    CHECK(t_quantile(0.025, 15) == Catch::Approx(-2.1314495455597570).epsilon(1e-9));
}

TEST_CASE("t_quantile round-trips through t_cdf") {
    for (int df : {1, 2, 3, 5, 12, 40, 200}) {
        for (double p = 0.005; p < 0.9995; p += 0.0611) {
            const double t = t_quantile(p, df);
            CHECK(t_cdf(t, df) == Catch::Approx(p).margin(1e-10));
        }
    }
}

TEST_CASE("t_quantile approaches the normal quantile for large df") {
    const double z = normal_quantile(0.975);
    const double t = t_quantile(0.975, 10000);
    CHECK(t > z);
    CHECK(t - z < 5e-4);
}

TEST_CASE("t_quantile rejects bad input") {
    CHECK_THROWS(t_quantile(0.0, 5));
    CHECK_THROWS(t_quantile(1.0, 5));
    CHECK_THROWS(t_quantile(0.5, 0));
}
