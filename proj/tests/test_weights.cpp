#include <doctest.h>

#include <cmath>

#include "noisestab/spectral.hpp"
#include "noisestab/weights.hpp"
#include "oracles.hpp"

using namespace noisestab;

TEST_CASE("weight values and closed-form derivatives") {
    const WeightSpec w{0.1, 2.0};
    CHECK(weight_eval(w, 0.0) == 1.0);
    CHECK(weight_eval(w, 10.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double x : {-37.0, -3.0, 0.0, 0.5, 12.0, 250.0}) {
        const double s = 1.0 + 0.01 * x * x;
        const auto d = weight_derivatives(w, x);
        CHECK(d[0] == doctest::Approx(1.0 / s).epsilon(1e-14));
        CHECK(d[1] == doctest::Approx(-0.02 * x / (s * s)).epsilon(1e-12));
        CHECK(d[2] == doctest::Approx((-0.02 * s + 0.0008 * x * x) / (s * s * s)).epsilon(1e-12));
    }
}

TEST_CASE("weight derivatives against finite differences, non-integer q") {
    const WeightSpec w{0.3, 2.7};
    const double h = 1e-3;
    for (double x : {-4.0, 0.3, 2.0, 9.0}) {
        const auto d = weight_derivatives(w, x);
        const auto f = [&](double y) { return weight_eval(w, y); };
        const double fd1 = (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
        const double fd2 = (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h);
        CHECK(d[1] == doctest::Approx(fd1).epsilon(1e-9));
        CHECK(d[2] == doctest::Approx(fd2).epsilon(1e-6));
    }
}

TEST_CASE("weight mass") {
    CHECK(weight_mass({0.1, 2.0}) == doctest::Approx(10.0 * M_PI).epsilon(1e-12));
    CHECK(weight_mass({1.0, 2.0}) == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(weight_mass({1.0, 3.0}) == doctest::Approx(2.0).epsilon(1e-11));
    for (double q : {1.2, 1.5, 2.5, 4.0, 7.0})
        CHECK(weight_mass({0.2, q}) == doctest::Approx(oracle::weight_mass_closed(0.2, q)).epsilon(1e-10));
    for (double q : {3.0, 4.0})
        CHECK(weight_mass({0.2, q}) == doctest::Approx(oracle::weight_mass(0.2, q)).epsilon(1e-9));
    // ||rho||_1 scales as 1 / c
    CHECK(weight_mass({0.05, 2.5}) / weight_mass({0.2, 2.5}) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK_THROWS_AS(weight_mass({0.1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(weight_mass({0.1, 0.5}), std::invalid_argument);
}

TEST_CASE("grid validation and field checks") {
    CHECK_THROWS_AS(Grid({10.0, 7}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(Grid({-1.0, 64}).validate(), std::invalid_argument);
    const Grid g{32.0 * M_PI, 512};
    CHECK(g.x(0) == doctest::Approx(-16.0 * M_PI));
    CHECK(g.points()[511] == doctest::Approx(16.0 * M_PI - g.dx()));
    Field bad = Field::Zero(512);
    bad[3] = NAN;
    CHECK_THROWS_AS(check_field(bad, g), std::invalid_argument);
    CHECK_THROWS_AS(check_field(Field::Zero(10), g), std::invalid_argument);
}

TEST_CASE("weighted norms") {
    const Grid g{2000.0, 20000};
    const WeightSpec w{1.0, 2.0};
    const Field one = Field::Ones(g.size);
    // truncated mass: 2 atan(c L / 2) / c
    CHECK(weighted_lp_norm(one, g, w, 2.0) == doctest::Approx(std::sqrt(2.0 * std::atan(1000.0))).epsilon(1e-6));
    CHECK(weighted_lp_norm(one, g, w, 1.0) == doctest::Approx(2.0 * std::atan(1000.0)).epsilon(1e-6));
    const Field two = 2.0 * one;
    CHECK(weighted_lp_norm(two, g, w, 3.0) == doctest::Approx(2.0 * weighted_lp_norm(one, g, w, 3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(weighted_lp_norm(one, g, w, 0.5), std::invalid_argument);
    Field bad = one;
    bad[0] = INFINITY;
    CHECK_THROWS_AS(weighted_lp_norm(bad, g, w, 2.0), std::invalid_argument);
}

TEST_CASE("weighted Sobolev seminorms of a single mode") {
    const Grid g{32.0 * M_PI, 512};
    const WeightSpec w{0.1, 2.0};
    const double k = 0.75;  // 12 periods on the grid
    const Field s = (k * g.points().array()).sin().matrix();
    const Field c = (k * g.points().array()).cos().matrix();
    const double ns = weighted_lp_norm(s, g, w, 2.0), nc = weighted_lp_norm(c, g, w, 2.0);
    const auto n = weighted_hk_seminorms(s, g, w, 4);
    REQUIRE(n.size() == 5);
    CHECK(n[0] == doctest::Approx(ns).epsilon(1e-14));
    CHECK(n[1] == doctest::Approx(k * nc).epsilon(1e-10));
    CHECK(n[2] == doctest::Approx(k * k * ns).epsilon(1e-10));
    CHECK(n[3] == doctest::Approx(k * k * k * nc).epsilon(1e-10));
    CHECK(n[4] == doctest::Approx(k * k * k * k * ns).epsilon(1e-10));
    CHECK_THROWS_AS(weighted_hk_seminorms(s, g, w, 5), std::invalid_argument);
}

TEST_CASE("sup |rho^(n)| / rho") {
    // q = 2: |rho'| / rho = 2 c^2 |x| / (1 + c^2 x^2), largest (= c) at |c x| = 1;
    // rho'' / rho = (6 c^4 x^2 - 2 c^2) / (1 + c^2 x^2)^2, largest in modulus (2 c^2) at x = 0.
    const auto r = weight_derivative_ratios({0.1, 2.0}, 500.0, 200001);
    CHECK(r[0] == doctest::Approx(0.1).epsilon(1e-8));
    CHECK(r[1] == doctest::Approx(0.02).epsilon(1e-12));
}
