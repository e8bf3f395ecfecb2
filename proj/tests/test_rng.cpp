#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "metacorr/rng.hpp"

namespace mc = metacorr;

TEST_CASE("stream_key separates seed, hi and lo", "[rng]") {
    const std::uint64_t base = mc::stream_key(1, 2, 3);
    REQUIRE(mc::stream_key(1, 2, 3) == base);
    REQUIRE(mc::stream_key(2, 2, 3) != base);
    REQUIRE(mc::stream_key(1, 3, 3) != base);
    REQUIRE(mc::stream_key(1, 2, 4) != base);
    REQUIRE(mc::stream_key(1, 3, 2) != mc::stream_key(1, 2, 3));
}

TEST_CASE("RngStream is deterministic per key", "[rng]") {
    mc::RngStream a(42, 7, 9);
    mc::RngStream b(42, 7, 9);
    for (int i = 0; i < 100; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
    mc::RngStream c(42, 7, 10);
    mc::RngStream d(42, 7, 9);
    bool diverged = false;
    for (int i = 0; i < 100; ++i) {
        if (c.next_u64() != d.next_u64()) diverged = true;
    }
    REQUIRE(diverged);
}

TEST_CASE("uniform draws live in (0, 1] with the right moments", "[rng]") {
    mc::RngStream s(20210916, 0, 1);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
        sum += u;
        sumsq += u * u;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    REQUIRE(mean == Catch::Approx(0.5).margin(0.005));
    REQUIRE(var == Catch::Approx(1.0 / 12.0).margin(0.002));
}

TEST_CASE("normal draws have standard moments", "[rng]") {
    mc::RngStream s(20210916, 1, 1);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0, sumcb = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal();
        sum += x;
        sumsq += x * x;
        sumcb += x * x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double skew = (sumcb / n - 3.0 * mean * var - mean * mean * mean) / std::pow(var, 1.5);
    REQUIRE(std::abs(mean) < 0.01);
    REQUIRE(std::abs(var - 1.0) < 0.02);
    REQUIRE(std::abs(skew) < 0.05);
}

TEST_CASE("gamma draws match mean and variance across shapes", "[rng]") {
    const int n = 200000;
    int stream_lo = 0;
    for (double shape : {0.6, 2.5, 11.0}) {
        mc::RngStream s(20210916, 2, static_cast<std::uint64_t>(stream_lo++));
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = s.gamma(shape);
            REQUIRE(x > 0.0);
            sum += x;
            sumsq += x * x;
        }
        const double mean = sum / n;
        const double var = sumsq / n - mean * mean;
        REQUIRE(std::abs(mean - shape) < 5.0 * std::sqrt(shape / n));
        REQUIRE(var == Catch::Approx(shape).epsilon(0.06));
    }
}

TEST_CASE("beta draws match mean and variance", "[rng]") {
    struct Case {
        double a, b;
    };
    const int n = 200000;
    int stream_lo = 0;
    for (const auto& c : {Case{12.0, 12.0}, Case{2.0, 5.0}}) {
        mc::RngStream s(20210916, 3, static_cast<std::uint64_t>(stream_lo++));
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = s.beta(c.a, c.b);
            REQUIRE(x > 0.0);
            REQUIRE(x < 1.0);
            sum += x;
            sumsq += x * x;
        }
        const double mean = sum / n;
        const double var = sumsq / n - mean * mean;
        const double want_mean = c.a / (c.a + c.b);
        const double want_var =
            c.a * c.b / ((c.a + c.b) * (c.a + c.b) * (c.a + c.b + 1.0));
        REQUIRE(mean == Catch::Approx(want_mean).margin(0.003));
        REQUIRE(var == Catch::Approx(want_var).epsilon(0.05));
    }
}

TEST_CASE("normal_at is deterministic and well distributed", "[rng]") {
    REQUIRE(mc::normal_at(5, 10, 3) == mc::normal_at(5, 10, 3));
    REQUIRE(mc::normal_at(5, 10, 3) != mc::normal_at(5, 10, 4));
    REQUIRE(mc::normal_at(5, 11, 3) != mc::normal_at(5, 10, 3));

    // Moments over a replicate x index grid.
    const int reps = 300, idx = 300;
    double sum = 0.0, sumsq = 0.0;
    for (int j = 0; j < reps; ++j) {
        for (int i = 0; i < idx; ++i) {
            const double x = mc::normal_at(20210916, j, i);
            sum += x;
            sumsq += x * x;
        }
    }
    const double n = static_cast<double>(reps) * idx;
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    REQUIRE(std::abs(mean) < 0.01);
    REQUIRE(std::abs(var - 1.0) < 0.02);

    // Neighbouring indices within a replicate are uncorrelated.
    double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    const int pairs = 20000;
    for (int j = 0; j < pairs; ++j) {
        const double x = mc::normal_at(77, j, 0);
        const double y = mc::normal_at(77, j, 1);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double mx = sx / pairs, my = sy / pairs;
    const double corr = (sxy / pairs - mx * my) /
                        std::sqrt((sxx / pairs - mx * mx) * (syy / pairs - my * my));
    REQUIRE(std::abs(corr) < 0.02);
}
