#include "noisestab/weights.hpp"

#include <algorithm>
#include <string>

#include "noisestab/quadrature.hpp"
#include "noisestab/spectral.hpp"

namespace noisestab {

namespace {

// Truncated power series in h up to h^4.
using Jet = std::array<double, 5>;

Jet multiply(const Jet& a, const Jet& b) {
    Jet r{};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; i + j < 5; ++j) r[i + j] += a[i] * b[j];
    return r;
}

// exp(u) for a jet with u[0] == 0.
Jet exp_nilpotent(const Jet& u) {
    Jet result{1.0, 0, 0, 0, 0};
    Jet power{1.0, 0, 0, 0, 0};
    double factorial = 1.0;
    for (int n = 1; n <= 4; ++n) {
        power = multiply(power, u);
        factorial *= n;
        for (int i = 0; i < 5; ++i) result[i] += power[i] / factorial;
    }
    return result;
}

// log(1 + t) for a jet with t[0] == 0.
Jet log1p_nilpotent(const Jet& t) {
    Jet result{};
    Jet power{1.0, 0, 0, 0, 0};
    for (int n = 1; n <= 4; ++n) {
        power = multiply(power, t);
        const double coef = (n % 2 == 1 ? 1.0 : -1.0) / n;
        for (int i = 0; i < 5; ++i) result[i] += coef * power[i];
    }
    return result;
}

// int_X^inf (1 + c^2 x^2)^(-q/2) dx via the binomial series in (cX)^-2.
double weight_tail(const WeightSpec& w, double X) {
    if (w.q == 2.0) return (0.5 * M_PI - std::atan(w.c * X)) / w.c;
    const double a = -0.5 * w.q;
    const double cx = w.c * X;
    double binom = 1.0;
    double sum = 0.0;
    for (int n = 0; n < 200; ++n) {
        const double term = binom * std::pow(cx, -w.q - 2.0 * n) * X / (w.q + 2.0 * n - 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        binom *= (a - n) / (n + 1.0);
    }
    return sum;
}

}  // namespace

std::array<double, 5> weight_derivatives(const WeightSpec& w, double x) {
    const double c2 = w.c * w.c;
    const double s0 = 1.0 + c2 * x * x;
    // s(x+h)/s0 - 1 = (2 c^2 x h + c^2 h^2) / s0
    const Jet t{0.0, 2.0 * c2 * x / s0, c2 / s0, 0.0, 0.0};
    Jet logs = log1p_nilpotent(t);
    for (auto& v : logs) v *= -0.5 * w.q;
    Jet series = exp_nilpotent(logs);
    const double rho0 = std::pow(s0, -0.5 * w.q);
    std::array<double, 5> d{};
    double factorial = 1.0;
    for (int n = 0; n < 5; ++n) {
        if (n > 0) factorial *= n;
        d[n] = rho0 * series[n] * factorial;
    }
    return d;
}

double weight_mass(const WeightSpec& w, double tol) {
    w.validate();
    if (!w.integrable())
        throw std::invalid_argument("weight_mass: q = " + std::to_string(w.q) +
                                    " <= 1, weight is not integrable");
    // Core [0, X] with cX = 10, analytic tail beyond.
    const double X = 10.0 / w.c;
    std::vector<double> breaks;
    for (int i = 0; i <= 10; ++i) breaks.push_back(X * i / 10.0);
    auto core = quad::integrate([&](double x) { return weight_eval(w, x); }, breaks, 0.1 * tol);
    return 2.0 * (core.value + weight_tail(w, X));
}

void check_field(const Field& f, const Grid& g) {
    if (f.size() != g.size) throw std::invalid_argument("field length does not match grid");
    if (!f.allFinite()) throw std::invalid_argument("field has non-finite entries");
}

Eigen::VectorXd weight_samples(const Grid& g, const WeightSpec& w) {
    return g.points().unaryExpr([&](double x) { return weight_eval(w, x); });
}

std::vector<double> weighted_hk_seminorms(const Field& f, const Grid& g, const WeightSpec& w, int k) {
    if (k < 0 || k > 4) throw std::invalid_argument("weighted_hk_seminorms: k must be in [0, 4]");
    check_field(f, g);
    const FourierGrid fourier(g);
    const Eigen::VectorXd rho = weight_samples(g, w);
    std::vector<double> out;
    out.push_back(weighted_lp_norm(f, rho, g.dx(), 2.0));
    for (int n = 1; n <= k; ++n) out.push_back(weighted_lp_norm(fourier.derivative(f, n), rho, g.dx(), 2.0));
    return out;
}

std::array<double, 4> weight_derivative_ratios(const WeightSpec& w, double x_max, int samples) {
    std::array<double, 4> ratios{};
    for (int i = 0; i < samples; ++i) {
        const double x = -x_max + 2.0 * x_max * i / (samples - 1);
        const auto d = weight_derivatives(w, x);
        for (int n = 1; n <= 4; ++n) ratios[n - 1] = std::max(ratios[n - 1], std::abs(d[n]) / d[0]);
    }
    return ratios;
}

}  // namespace noisestab
