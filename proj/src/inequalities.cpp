#include "noisestab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "noisestab/errors.hpp"
#include "noisestab/spectral.hpp"
#include "noisestab/thresholds.hpp"

namespace noisestab {

namespace {

// Gaussian window exp(-alpha (x/W)^2) with value 1e-15 at x = 2 W.
constexpr double kWindowAlpha = 34.538776394910684 / 4.0;

double inner(const Field& a, const Field& b, const Eigen::VectorXd& rho, double dx) {
    return dx * (rho.array() * a.array() * b.array()).sum();
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

// Grid, weight samples and transform shared by the checks.
struct Probe {
    Probe(const Grid& g, const WeightSpec& w)
        : grid(g), fourier(g), rho(weight_samples(g, w)), dx(g.dx()), c2(second_derivative_constant(w)) {}
    Grid grid;
    FourierGrid fourier;
    Eigen::VectorXd rho;
    double dx;
    double c2;
};

Margin numerical_range_margin(const Probe& p, const Field& v, double eta0, double C) {
    const Field v2 = p.fourier.derivative(v, 2);
    const Field v4 = p.fourier.derivative(v, 4);
    const Field Av = -(v + 2.0 * v2 + v4);
    const double lhs = inner(v, Av, p.rho, p.dx);
    const double n0 = inner(v, v, p.rho, p.dx);
    const double n2 = inner(v2, v2, p.rho, p.dx);
    const double rhs = -eta0 * n2 + C * eta0 * n0;
    return {rhs - lhs, n0 + n2 + std::abs(lhs)};
}

Margin interpolation_margin(const Probe& p, const Field& v) {
    const double n0 = std::sqrt(inner(v, v, p.rho, p.dx));
    const Field v1 = p.fourier.derivative(v, 1);
    const Field v2 = p.fourier.derivative(v, 2);
    const double n1sq = inner(v1, v1, p.rho, p.dx);
    const double n2 = std::sqrt(inner(v2, v2, p.rho, p.dx));
    const double rhs = 0.5 * p.c2 * n0 * n0 + n0 * n2;
    return {rhs - n1sq, n1sq + n0 * n2 + n0 * n0};
}

Margin cubic_margin(const Probe& p, const Field& v, double z, double delta) {
    const double c_delta = cubic_constant(delta);
    const Eigen::ArrayXd a = v.array();
    const Eigen::ArrayXd shifted = a + z;
    const double lhs = p.dx * (p.rho.array() * (-shifted.cube() + z * z * z) * a).sum();
    const double n2 = p.dx * (p.rho.array() * a.square()).sum();
    const double n4 = p.dx * (p.rho.array() * a.square().square()).sum();
    const double rhs = -c_delta * z * z * n2 - delta * n4;
    return {rhs - lhs, 3.0 * z * z * n2 + n4 + std::abs(lhs)};
}

}  // namespace

Field make_test_function(const TestFunctionSpec& spec, std::uint64_t index) {
    const Grid& g = spec.grid;
    g.validate();
    const double margin = 0.5 * g.length - 2.0 * spec.half_width;
    if (margin <= 0.0) throw std::invalid_argument("test function window does not fit the grid");

    auto rng = sample_rng(spec.seed, index);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    const double center = (2.0 * unit(rng) - 1.0) * std::min(spec.half_width, 0.9 * margin);
    const int terms = 1 + static_cast<int>(unit(rng) * 6.0);
    const Eigen::ArrayXd x = g.points().array();

    Eigen::ArrayXd trig = Eigen::ArrayXd::Constant(g.size, normal(rng) * unit(rng));
    for (int j = 0; j < terms; ++j) {
        const double k = spec.band * unit(rng);
        const double phase = 2.0 * M_PI * unit(rng);
        trig += normal(rng) * (k * x + phase).cos();
    }
    const Eigen::ArrayXd s = (x - center) / spec.half_width;
    const Field v = (trig * (-kWindowAlpha * s.square()).exp()).matrix();
    require_resolved(v, g);
    return v;
}

void require_resolved(const Field& v, const Grid& g) {
    const FourierGrid fourier(g);
    const Spectrum s = fourier.forward(v);
    const auto& mask = fourier.dealias_mask();
    double total = 0.0, tail = 0.0;
    for (Eigen::Index m = 0; m < s.size(); ++m) {
        const double e = std::norm(s[m]);
        total += e;
        if (mask[m] == 0.0) tail += e;
    }
    if (tail > 1e-10 * total) throw std::invalid_argument("test function is under-resolved on the grid");
}

double second_derivative_constant(const WeightSpec& w) {
    // For this weight family |rho''|/rho peaks within |c x| <= few; 50/c covers it.
    return weight_derivative_ratios(w, 50.0 / w.c, 40001)[1];
}

Margin check_numerical_range(const Field& v, const Grid& g, const WeightSpec& w, double eta0, double C) {
    check_field(v, g);
    return numerical_range_margin(Probe(g, w), v, eta0, C);
}

Margin check_interpolation(const Field& v, const Grid& g, const WeightSpec& w) {
    check_field(v, g);
    return interpolation_margin(Probe(g, w), v);
}

Margin check_cubic_inequality(const Field& v, double z, double delta, const Grid& g, const WeightSpec& w) {
    check_field(v, g);
    return cubic_margin(Probe(g, w), v, z, delta);
}

Calibration calibrate_numerical_range(const WeightSpec& w, const TestFunctionSpec& spec, int samples,
                                      const NumericalRangeConstants& k) {
    const Probe p(spec.grid, w);
    const double eta0 = k.eta0(w.c);
    Calibration cal;
    cal.required_C = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const Field v = make_test_function(spec, static_cast<std::uint64_t>(i));
        const Field v2 = p.fourier.derivative(v, 2);
        const Field v4 = p.fourier.derivative(v, 4);
        const double lhs = inner(v, -(v + 2.0 * v2 + v4), p.rho, p.dx);
        const double n0 = inner(v, v, p.rho, p.dx);
        const double n2 = inner(v2, v2, p.rho, p.dx);
        // lhs <= eta0 (C n0 - n2)
        cal.required_C = std::max(cal.required_C, (lhs / eta0 + n2) / n0);
        const double room = k.C * n0 - n2;
        if (lhs > 0.0 && room > 0.0) cal.required_eta0 = std::max(cal.required_eta0, lhs / room);
    }
    return cal;
}

SuiteReport run_inequality_suite(const WeightSpec& w, const TestFunctionSpec& spec, int samples,
                                 const NumericalRangeConstants& k, double tolerance) {
    const Probe p(spec.grid, w);
    SuiteReport report;
    report.samples = samples;
    report.min_numerical_range = report.min_interpolation = report.min_cubic = INFINITY;
    auto rng = sample_rng(spec.seed ^ 0xc0b1cULL, 0);
    std::uniform_real_distribution<double> z_dist(-3.0, 3.0);
    std::uniform_real_distribution<double> delta_dist(1e-6, 0.24);
    for (int i = 0; i < samples; ++i) {
        const Field v = make_test_function(spec, static_cast<std::uint64_t>(i));
        const double nr = numerical_range_margin(p, v, k.eta0(w.c), k.C).normalized();
        const double ip = interpolation_margin(p, v).normalized();
        const double cu = cubic_margin(p, v, z_dist(rng), delta_dist(rng)).normalized();
        if (nr < report.min_numerical_range) {
            report.min_numerical_range = nr;
            if (nr < -tolerance) report.worst_numerical_range = v;
        }
        if (ip < report.min_interpolation) {
            report.min_interpolation = ip;
            if (ip < -tolerance) report.worst_interpolation = v;
        }
        if (cu < report.min_cubic) {
            report.min_cubic = cu;
            if (cu < -tolerance) report.worst_cubic = v;
        }
    }
    return report;
}

double numerical_range_required_C(const WeightSpec& w, const Grid& g, double eta0) {
    g.validate();
    if (!(eta0 > 0.0)) throw std::invalid_argument("eta0 must be positive");
    const Eigen::Index modes = g.size / 3;
    const Eigen::Index dim = 1 + 2 * modes;
    const Eigen::ArrayXd x = g.points().array();
    const double k0 = 2.0 * M_PI / g.length;

    Eigen::MatrixXd basis(g.size, dim);
    Eigen::VectorXd k2(dim);
    basis.col(0).setOnes();
    k2[0] = 0.0;
    for (Eigen::Index j = 1; j <= modes; ++j) {
        const double k = k0 * static_cast<double>(j);
        basis.col(2 * j - 1) = (k * x).cos().matrix();
        basis.col(2 * j) = (k * x).sin().matrix();
        k2[2 * j - 1] = k2[2 * j] = k * k;
    }
    const Eigen::VectorXd weights = weight_samples(g, w) * g.dx();
    const Eigen::MatrixXd gram = basis.transpose() * (weights.asDiagonal() * basis);
    // <v, A v> with A = -(1 + d_xx)^2, plus eta0 ||v''||^2, both in the weighted product.
    const Eigen::VectorXd symbol = -(1.0 - k2.array()).square().matrix();
    const Eigen::MatrixXd form = gram * symbol.asDiagonal();
    const Eigen::MatrixXd second = k2.asDiagonal() * gram * k2.asDiagonal();
    const Eigen::MatrixXd lhs = 0.5 * (form + form.transpose()) + eta0 * second;

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(lhs, gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalFailure("required C: eigen solver failed");
    return solver.eigenvalues().maxCoeff() / eta0;
}

}  // namespace noisestab
