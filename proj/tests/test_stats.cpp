#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "metacorr/stats.hpp"

namespace mc = metacorr;

TEST_CASE("pearson_r matches hand-computed value", "[stats]") {
    std::vector<double> x{1.0, 2.0, 3.0};
    std::vector<double> y{1.0, 3.0, 2.0};
    REQUIRE(mc::pearson_r(x, y) == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("pearson_r is invariant under affine maps of either input", "[stats]") {
    std::vector<double> x{0.3, -1.2, 2.5, 0.9, -0.4, 1.7};
    std::vector<double> y{1.1, 0.2, 2.9, 1.5, 0.7, 2.2};
    const double base = mc::pearson_r(x, y);

    std::vector<double> xs(x.size()), ys(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xs[i] = 3.5 * x[i] - 7.0;
        ys[i] = 0.25 * y[i] + 11.0;
    }
    REQUIRE(mc::pearson_r(xs, ys) == Catch::Approx(base).margin(1e-12));

    // Negative slope on one side flips the sign.
    for (std::size_t i = 0; i < x.size(); ++i) xs[i] = -2.0 * x[i] + 1.0;
    REQUIRE(mc::pearson_r(xs, y) == Catch::Approx(-base).margin(1e-12));
}

TEST_CASE("pearson_r rejects degenerate input", "[stats]") {
    std::vector<double> x{1.0, 2.0};
    std::vector<double> y{2.0, 1.0};
    REQUIRE_THROWS_AS(mc::pearson_r(x, y), std::invalid_argument);

    std::vector<double> cx{1.0, 1.0, 1.0};
    std::vector<double> vy{0.0, 1.0, 2.0};
    REQUIRE_THROWS_AS(mc::pearson_r(cx, vy), std::invalid_argument);

    std::vector<double> x3{1.0, 2.0, 3.0};
    std::vector<double> y4{1.0, 2.0, 3.0, 4.0};
    REQUIRE_THROWS_AS(mc::pearson_r(x3, y4), std::invalid_argument);
}

TEST_CASE("pearson_r reports perfect collinearity as +-1", "[stats]") {
    std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    std::vector<double> y{2.0, 4.0, 6.0, 8.0};
    const double r = mc::pearson_r(x, y);
    REQUIRE(r == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(std::abs(r) <= 1.0);
    for (auto& v : y) v = -v;
    REQUIRE(mc::pearson_r(x, y) == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("clamp_r bounds and passthrough", "[stats]") {
    REQUIRE(mc::clamp_r(0.5) == Catch::Approx(0.5));
    REQUIRE(mc::clamp_r(1.0) == Catch::Approx(0.999));
    REQUIRE(mc::clamp_r(-1.0) == Catch::Approx(-0.999));
    REQUIRE(mc::clamp_r(0.9995, 0.9999) == Catch::Approx(0.9995));
}

TEST_CASE("fisher_z matches closed form and inverts", "[stats]") {
    REQUIRE(mc::fisher_z(0.5) == Catch::Approx(0.5 * std::log(3.0)).margin(1e-15));
    REQUIRE(mc::fisher_z(0.5) == Catch::Approx(0.5493061443340549).margin(1e-15));
    REQUIRE(mc::fisher_z(0.0) == 0.0);

    for (double r : {-0.98, -0.6, -0.1, 0.0, 0.2, 0.75, 0.995}) {
        REQUIRE(mc::inv_fisher(mc::fisher_z(r)) == Catch::Approx(r).margin(1e-13));
    }
    REQUIRE_THROWS_AS(mc::fisher_z(1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(mc::fisher_z(-1.0), std::invalid_argument);
}

TEST_CASE("simpson_integrate is exact on cubics", "[stats]") {
    auto cube = [](double x) { return x * x * x; };
    REQUIRE(mc::simpson_integrate(cube, 0.0, 1.0, {2, 5.0}) == Catch::Approx(0.25).margin(1e-15));
    REQUIRE(mc::simpson_integrate(cube, -1.0, 2.0, {10, 5.0}) == Catch::Approx(15.0 / 4.0).margin(1e-12));
}

TEST_CASE("simpson_integrate converges on sin", "[stats]") {
    auto f = [](double x) { return std::sin(x); };
    REQUIRE(mc::simpson_integrate(f, 0.0, mc::kPi) == Catch::Approx(2.0).margin(1e-8));
}

TEST_CASE("simpson_integrate rejects bad panel counts and ranges", "[stats]") {
    auto f = [](double x) { return x; };
    REQUIRE_THROWS_AS(mc::simpson_integrate(f, 0.0, 1.0, {3, 5.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(mc::simpson_integrate(f, 0.0, 1.0, {0, 5.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(mc::simpson_integrate(f, 1.0, 1.0, {2, 5.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(mc::simpson_integrate(f, 2.0, 1.0, {2, 5.0}), std::invalid_argument);
}

namespace {

// Reference value for E[tanh(X)], X ~ N(mu, tau2), on a very fine trapezoid
// grid over mu +/- 8*tau. Deliberately a different rule, width, and panel
// count than the implementation under test.
double tanh_mean_trapezoid(double mu, double tau2) {
    const double tau = std::sqrt(tau2);
    const double a = mu - 8.0 * tau;
    const double b = mu + 8.0 * tau;
    const int n = 100000;
    const double h = (b - a) / n;
    auto f = [&](double x) { return std::tanh(x) * mc::normal_pdf((x - mu) / tau) / tau; };
    double acc = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) acc += f(a + i * h);
    return acc * h;
}

}  // namespace

TEST_CASE("integral_z_to_r agrees with an independent quadrature", "[stats]") {
    struct Case {
        double mu;
        double tau2;
    };
    for (const auto& c : {Case{0.0, 0.1}, Case{0.5, 0.04}, Case{1.2, 0.3}, Case{-0.7, 0.01}}) {
        const double got = mc::integral_z_to_r(c.mu, c.tau2);
        const double want = tanh_mean_trapezoid(c.mu, c.tau2);
        REQUIRE(got == Catch::Approx(want).margin(2e-6));
    }
}

TEST_CASE("integral_z_to_r properties over a mu/tau2 grid", "[stats]") {
    const std::vector<double> tau2s{0.001, 0.01, 0.05, 0.2, 0.5};
    const int mu_points = 20;
    for (double tau2 : tau2s) {
        double prev = -2.0;
        for (int i = 0; i < mu_points; ++i) {
            const double mu = -2.0 + 4.0 * i / (mu_points - 1);
            const double v = mc::integral_z_to_r(mu, tau2);

            // Odd in mu.
            REQUIRE(v == Catch::Approx(-mc::integral_z_to_r(-mu, tau2)).margin(1e-12));
            // Averaging tanh over a symmetric distribution shrinks toward 0.
            REQUIRE(std::abs(v) <= std::abs(std::tanh(mu)) + 1e-12);
            REQUIRE(std::abs(v) < 1.0);
            // Strictly increasing in mu.
            REQUIRE(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("integral_z_to_r degenerates to tanh at tiny tau2", "[stats]") {
    REQUIRE(mc::integral_z_to_r(0.7, 0.0) == Catch::Approx(std::tanh(0.7)).margin(1e-15));
    REQUIRE(mc::integral_z_to_r(-1.3, 1e-13) == Catch::Approx(std::tanh(-1.3)).margin(1e-12));
}

TEST_CASE("truncnorm_mean_shift is zero for symmetric truncation", "[stats]") {
    REQUIRE(mc::truncnorm_mean_shift(0.0, 1.0, -0.999, 0.999) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(mc::truncnorm_mean_shift(0.3, 0.2, 0.3 - 0.5, 0.3 + 0.5) ==
            Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("truncnorm_mean_shift matches a quadrature oracle", "[stats]") {
    struct Case {
        double mu, sigma, lo, hi;
    };
    for (const auto& c : {Case{0.8, 0.4, -0.999, 0.999}, Case{0.0, 1.5, -0.999, 0.999},
                          Case{-0.5, 0.16, -0.999, 0.999}}) {
        // E[X | lo < X < hi] - mu via direct integration.
        auto numer = [&](double x) {
            return (x - c.mu) * mc::normal_pdf((x - c.mu) / c.sigma) / c.sigma;
        };
        auto denom = [&](double x) { return mc::normal_pdf((x - c.mu) / c.sigma) / c.sigma; };
        const double top = mc::simpson_integrate(numer, c.lo, c.hi, {20000, 5.0});
        const double bot = mc::simpson_integrate(denom, c.lo, c.hi, {20000, 5.0});
        REQUIRE(mc::truncnorm_mean_shift(c.mu, c.sigma, c.lo, c.hi) ==
                Catch::Approx(top / bot).margin(1e-8));
    }
}

TEST_CASE("truncnorm_mean_shift rejects vanishing mass", "[stats]") {
    REQUIRE_THROWS_AS(mc::truncnorm_mean_shift(50.0, 0.1, -0.999, 0.999), std::runtime_error);
}

TEST_CASE("bias_corrected_r pins and bounds", "[stats]") {
    // r + r(1-r^2)/(2(n-1)) at r=0.5, n=21: 0.5 + 0.5*0.75/40.
    REQUIRE(mc::bias_corrected_r(0.5, 21) == Catch::Approx(0.509375).margin(1e-15));
    REQUIRE(mc::bias_corrected_r(0.0, 30) == 0.0);
    REQUIRE(mc::bias_corrected_r(-0.5, 21) == Catch::Approx(-0.509375).margin(1e-15));
    REQUIRE(std::abs(mc::bias_corrected_r(0.999, 4)) <= 0.999);
    REQUIRE_THROWS_AS(mc::bias_corrected_r(0.5, 3), std::invalid_argument);
}
