#include <doctest.h>

#include <cmath>

#include "noisestab/fokker_planck.hpp"
#include "oracles.hpp"

using namespace noisestab;

TEST_CASE("Gaussian and Laplace limits") {
    const auto ou = second_moment({-1.0, 0.1}, 1e-10);
    CHECK(std::abs(ou.value - 0.005) / 0.005 < 0.02);
    CHECK(ou.method == MomentMethod::quadrature);
    CHECK(second_moment({-50.0, 1.0}, 1e-10).value == doctest::Approx(1.0 / 100.0).epsilon(1e-3));
    CHECK(std::abs(second_moment({1.0, 0.01}, 1e-10).value - 1.0) < 1e-3);
    CHECK(std::abs(second_moment({4.0, 0.02}, 1e-10).value - 4.0) < 1e-3);
}

TEST_CASE("moments against an independent Riemann sum") {
    for (auto [lam, sig] : {std::pair{-1.0, 0.1}, {-0.5, 0.5}, {0.0, 0.3}, {1.0, 1.0}, {0.5, 0.05}, {-0.9, 1.7}}) {
        for (int n : {2, 4}) {
            const double ref = oracle::moment(lam, sig, n);
            CHECK(stationary_moment({lam, sig}, n, 1e-11).value == doctest::Approx(ref).epsilon(1e-7));
        }
    }
}

TEST_CASE("odd moments vanish and the zeroth is one") {
    for (auto [lam, sig] : {std::pair{-1.0, 0.1}, {1.0, 0.01}, {2.0, 3.0}}) {
        CHECK(std::abs(stationary_moment({lam, sig}, 1, 1e-10).value) < 1e-12);
        CHECK(std::abs(stationary_moment({lam, sig}, 3, 1e-10).value) < 1e-12);
        CHECK(stationary_moment({lam, sig}, 0, 1e-10).value == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("E z^2 increases with sigma when lambda <= 0") {
    for (double lam : {-2.0, -0.5, 0.0}) {
        double prev = 0.0;
        for (double s = 0.05; s <= 3.0; s += 0.05) {
            const double m = second_moment({lam, s}, 1e-10).value;
            CHECK(m > prev);
            prev = m;
        }
    }
}

TEST_CASE("E z^2 first dips below lambda when lambda > 0") {
    // small-noise expansion: E z^2 = lambda - sigma^2 / (2 lambda) + ...
    const double lam = 1.0;
    const double small = second_moment({lam, 0.2}, 1e-10).value;
    CHECK(small < lam);
    CHECK(small == doctest::Approx(lam - 0.04 / (2 * lam)).epsilon(2e-3));
    CHECK(second_moment({lam, 3.0}, 1e-10).value > lam);
}

TEST_CASE("asymptotic formulas are reported as printed") {
    ModelSpec sh{OperatorKind::swift_hohenberg, 0.1, 0.2};
    CHECK(second_moment_asymptotic(sh).value == doctest::Approx(2 * 0.04 / 0.9));
    CHECK(second_moment_asymptotic(sh).method == MomentMethod::asymptotic);
    ModelSpec bh{OperatorKind::biharmonic, 0.5, 0.1};
    CHECK(second_moment_asymptotic(bh).value == doctest::Approx(0.5 * (1 + 0.01 / 0.25)));
    ModelSpec shifted{OperatorKind::shifted, 0.5, 0.1, 0.5};
    CHECK(second_moment_asymptotic(shifted).value == doctest::Approx(0.25 * (1 + 0.01 / 0.0625)));
    sh.nu = 1.2;
    CHECK_THROWS_AS(second_moment_asymptotic(sh), std::invalid_argument);
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(second_moment({-1.0, 0.0}, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(second_moment({-1.0, 0.1}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(stationary_moment({-1.0, 0.1}, -1, 1e-8), std::invalid_argument);
}

TEST_CASE("sharply peaked density at very small sigma") {
    for (auto [lambda, sigma] : {std::pair{0.01, 1e-6}, {0.1, 1e-5}, {2.0, 1e-4}}) {
        const double a = std::sqrt(lambda), w = sigma / (2.0 * a);
        auto rho = [&](double d) {
            const double s = d * (d + 2.0 * a);
            return std::exp(-s * s / (2.0 * sigma * sigma));
        };
        const double mass = oracle::simpson(rho, -40 * w, 40 * w, 20000);
        const double m2 = oracle::simpson([&](double d) { return (a + d) * (a + d) * rho(d); }, -40 * w, 40 * w, 20000);
        CHECK(noisestab::second_moment({lambda, sigma}, 1e-10).value == doctest::Approx(m2 / mass).epsilon(1e-10));
    }
}
