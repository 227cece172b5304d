#include <doctest.h>

#include <cmath>

#include "noisestab/errors.hpp"
#include "noisestab/patterns.hpp"
#include "noisestab/spde.hpp"

using namespace noisestab;

TEST_CASE("operator symbol on the grid") {
    const Grid g{32.0 * M_PI, 512};
    const FourierGrid f(g);
    const ModelSpec sh{OperatorKind::swift_hohenberg, 0.1};
    const auto a = operator_symbol(sh, f);
    CHECK(a[0] == doctest::Approx(sh.lambda()));
    CHECK(a[16] == doctest::Approx(0.1));  // k = 1
    CHECK(a[512 - 16] == doctest::Approx(0.1));
}

TEST_CASE("constant mode of the stepper is the scalar exponential Euler step") {
    const Grid g{32.0 * M_PI, 64};
    const ModelSpec m{OperatorKind::swift_hohenberg, 0.1, 0.7};
    const double dt = 0.01;
    const SpdeStepper stepper(m, g, dt);
    Spectrum s = stepper.project(Field::Constant(g.size, 0.4));
    double z = 0.4;
    const NoisePath noise(9, dt, 0.0, 1.0);
    for (std::int64_t n = 0; n < noise.count(); ++n) {
        stepper.step(s, noise.at(n));
        z = exponential_euler_step({m.lambda(), m.sigma}, z, dt, noise.at(n));
        CHECK(stepper.constant_mode(s) == doctest::Approx(z).epsilon(1e-12));
    }
    // the field stays spatially constant
    const Field u = stepper.to_field(s);
    CHECK((u.array() - z).abs().maxCoeff() < 1e-12);
}

TEST_CASE("linear propagation is exact and the state stays dealiased") {
    const Grid g{32.0 * M_PI, 128};
    const ModelSpec m{OperatorKind::biharmonic, 0.2};
    const double dt = 0.05;
    const SpdeStepper lin(m, g, dt, false);
    const double k = 0.5;  // m = 8
    Spectrum s = lin.project((k * g.points().array()).cos().matrix());
    for (int i = 0; i < 20; ++i) lin.step(s, 0.0);
    const Field u = lin.to_field(s);
    const double growth = std::exp(20 * dt * m.symbol(k));
    CHECK((u - growth * (k * g.points().array()).cos().matrix()).cwiseAbs().maxCoeff() < 1e-12);

    const SpdeStepper full(m, g, dt);
    Field rough(g.size);
    for (Eigen::Index j = 0; j < g.size; ++j) rough[j] = (j % 3) - 1.0;
    Spectrum r = full.project(rough);
    full.step(r, 0.0);
    const auto& mask = full.fourier().dealias_mask();
    for (Eigen::Index j = 0; j < r.size(); ++j)
        if (mask[j] == 0.0) CHECK(std::abs(r[j]) == 0.0);
    CHECK(full.stiffness() == doctest::Approx(dt * (std::pow(2 * M_PI / g.length * 42, 4) - 0.2)));
}

TEST_CASE("biharmonic constants +-sqrt(nu) are stationary without noise") {
    const Grid g{32.0 * M_PI, 256};
    const ModelSpec m{OperatorKind::biharmonic, 0.25};
    for (double c : constant_states(m)) {
        const auto tr = simulate(m, g, {}, Field::Constant(g.size, c), 20.0, 0.01, 1);
        const Field& last = tr.snapshots[0].back();
        CHECK((last.array() - c).abs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("Swift-Hohenberg roll is stationary without noise") {
    const Grid g{32.0 * M_PI, 512};
    const ModelSpec m{OperatorKind::swift_hohenberg, 0.04};
    const auto roll = roll_branch(m, 1.0);
    const Field u0 = cosine_series_field(roll.coefficients, 1.0, g);
    CHECK(stationary_residual(m, g, u0) < 1e-10);
    const auto tr = simulate(m, g, {}, u0, 20.0, 0.005, 1);
    CHECK((tr.snapshots[0].back() - u0).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("z along the simulation is the pullback value advanced on the same increments") {
    const Grid g{32.0 * M_PI, 64};
    const ModelSpec m{OperatorKind::swift_hohenberg, 0.1, 0.6};
    const double dt = 0.01, T = 5.0;
    SimulationOptions opts;
    opts.record_interval = 1.0;
    opts.pullback_time = 150.0;
    const auto tr = simulate(m, g, {}, Field::Zero(g.size), T, dt, 77, opts);

    const ScalarSdeParams p{m.lambda(), m.sigma};
    const NoisePath back(77, dt, -150.0, 0.0);
    const double z0 = pullback_stationary(p, back, 150.0).value;
    const auto path = integrate_sde(p, z0, NoisePath(77, dt, 0.0, T), T, ScalarScheme::exponential_euler);
    REQUIRE(tr.times.size() == 6);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        CHECK(tr.z[i] == doctest::Approx(path.values[static_cast<Eigen::Index>(i * 100)]).epsilon(1e-13));
    CHECK(tr.z_sq_integral.front() == 0.0);
    CHECK(tr.z_sq_integral.back() > 0.0);
}

TEST_CASE("simulations are deterministic for a fixed seed") {
    const Grid g{32.0 * M_PI, 128};
    const ModelSpec m{OperatorKind::swift_hohenberg, 0.1, 0.5};
    const Field ic = make_initial_condition("random", m, g, 4);
    const auto a = simulate(m, g, {}, ic, 2.0, 0.01, 5);
    const auto b = simulate(m, g, {}, ic, 2.0, 0.01, 5);
    CHECK(a.members[0].u_norm == b.members[0].u_norm);
    CHECK(a.z == b.z);
    const auto c = simulate(m, g, {}, ic, 2.0, 0.01, 6);
    CHECK(a.z != c.z);
}

TEST_CASE("synchronization above the threshold, and the bound checks") {
    const Grid g{32.0 * M_PI, 256};
    const ModelSpec m{OperatorKind::swift_hohenberg, 0.1, 1.0};
    std::vector<Field> ics;
    for (const char* name : {"zero", "roll", "random"}) ics.push_back(make_initial_condition(name, m, g, 3));
    SimulationOptions opts;
    opts.record_interval = 0.1;
    const auto rep = synchronization_experiment(m, g, {}, ics, 40.0, 0.005, 3, opts);
    CHECK(rep.initial_distance > 1.0);
    CHECK(rep.ratio < 1e-3);
    CHECK(rep.rate < 0.0);

    const double eta = weighted_numerical_range(m, g, {});
    for (std::size_t i = 0; i < ics.size(); ++i) {
        const auto gw = gronwall_check(rep.trajectory, i, eta, 0.75);
        CHECK(gw.violations == 0);
        CHECK(gw.samples == static_cast<int>(rep.trajectory.times.size()));
        CHECK(absorbing_check(rep.trajectory, i, absorbing_radius_constant({}, 0.1, 10.0, 0.01, 0.1)).satisfied);
    }
    // the checks can fail
    CHECK(gronwall_check(rep.trajectory, 2, -1.0, 0.75).violations > 0);
    CHECK(absorbing_check(rep.trajectory, 1, -1.0).violations > 0);
    CHECK_THROWS_AS(synchronization_experiment(m, g, {}, {ics[0]}, 1.0, 0.01, 1), std::invalid_argument);
}

TEST_CASE("absorbing radius constant") {
    const WeightSpec w{0.1, 2.0};
    CHECK(absorbing_radius_constant(w, 0.1, 10.0, 0.01, 0.1) ==
          doctest::Approx(10.0 * M_PI * std::pow(0.2 + 0.1 + 1.0, 2) / 0.4).epsilon(1e-10));
}

TEST_CASE("discrete weighted numerical range") {
    const Grid g{32.0 * M_PI, 256};
    const ModelSpec m{OperatorKind::swift_hohenberg, 0.1};
    // without weight the range is the largest retained symbol, attained at k = 1
    CHECK(weighted_numerical_range(m, g, {1e-7, 2.0}) == doctest::Approx(0.1).epsilon(1e-6));
    const double a = weighted_numerical_range(m, g, {0.05, 2.0});
    const double b = weighted_numerical_range(m, g, {0.1, 2.0});
    CHECK(a > 0.1);
    CHECK(b > a);
    CHECK(b < 0.1 + 10.0 * 0.01);
}

TEST_CASE("initial conditions") {
    const Grid g{32.0 * M_PI, 256};
    const ModelSpec m{OperatorKind::swift_hohenberg, 0.1};
    CHECK(make_initial_condition("zero", m, g, 1).isZero());
    CHECK(make_initial_condition("random", m, g, 1) == make_initial_condition("random", m, g, 1));
    CHECK(make_initial_condition("random", m, g, 1) != make_initial_condition("random", m, g, 2));
    const Field roll = make_initial_condition("roll", m, g, 1);
    CHECK(roll.maxCoeff() == doctest::Approx(roll_branch(m, 1.0).period_values.maxCoeff()).epsilon(1e-6));
    CHECK_THROWS_AS(make_initial_condition("spiral", m, g, 1), std::invalid_argument);
}

TEST_CASE("blow-up is reported as a numerical failure") {
    const Grid g{32.0 * M_PI, 64};
    const ModelSpec m{OperatorKind::swift_hohenberg, 0.1};
    CHECK_THROWS_AS(simulate(m, g, {}, Field::Constant(g.size, 1e3), 10.0, 0.5, 1), NumericalFailure);
}

TEST_CASE("truncation: doubling the domain, error enters from the boundary") {
    const ModelSpec m{OperatorKind::swift_hohenberg, 0.1};
    const Grid small{32.0 * M_PI, 512}, large{64.0 * M_PI, 1024};
    auto bump = [](const Grid& g) {
        Field u(g.size);
        for (Eigen::Index j = 0; j < g.size; ++j) u[j] = 0.5 * std::exp(-g.x(j) * g.x(j) / 20.0) * std::cos(g.x(j));
        return u;
    };
    const Field a = simulate(m, small, {}, bump(small), 20.0, 0.005, 1).snapshots[0].back();
    const Field b = simulate(m, large, {}, bump(large), 20.0, 0.005, 1).snapshots[0].back();
    double core = 0.0, inner = 0.0, edge = 0.0;
    for (Eigen::Index j = 0; j < small.size; ++j) {
        const double d = std::abs(a[j] - b[j + small.size / 2]), x = std::abs(small.x(j));
        if (x < 10.0) core = std::max(core, d);
        if (x < 0.25 * small.length) inner = std::max(inner, d);
        else edge = std::max(edge, d);
    }
    MESSAGE("doubling L at T = 20: core " << core << ", inner half " << inner << ", outer half " << edge);
    CHECK(core < 1e-8);
    CHECK(inner < 1e-6);
    CHECK(edge > 100.0 * inner);
}
