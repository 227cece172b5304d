#include "noisestab/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "noisestab/quadrature.hpp"

namespace noisestab {

namespace {

constexpr double kLogDrop = 50.0;

void require_positive_sigma(const ScalarSdeParams& p) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
        throw std::invalid_argument("stationary density needs sigma > 0");
    if (!std::isfinite(p.lambda)) throw std::invalid_argument("lambda must be finite");
}

// Width of the density peak, from the curvature of the log-density at its maximum.
double peak_width(const ScalarSdeParams& p) {
    if (p.lambda > 0.0) return p.sigma / (2.0 * std::sqrt(p.lambda));
    if (p.lambda < 0.0) return std::min(p.sigma / std::sqrt(-2.0 * p.lambda), std::sqrt(p.sigma));
    return std::sqrt(p.sigma);
}

}  // namespace

double log_density_unnormalized(const ScalarSdeParams& p, double zeta) {
    const double z2 = zeta * zeta;
    return -(z2 * z2 - 2.0 * p.lambda * z2) / (2.0 * p.sigma * p.sigma);
}

double density_support(const ScalarSdeParams& p) {
    require_positive_sigma(p);
    const double drop = 2.0 * kLogDrop * p.sigma * p.sigma;
    if (p.lambda > 0.0) return std::sqrt(p.lambda + std::sqrt(drop));
    return std::sqrt(p.lambda + std::sqrt(p.lambda * p.lambda + drop));
}

MomentResult stationary_moment(const ScalarSdeParams& p, int n, double tol) {
    require_positive_sigma(p);
    if (!(tol > 0.0)) throw std::invalid_argument("moment tolerance must be positive");
    if (n < 0) throw std::invalid_argument("moment order must be non-negative");

    const double peak = p.lambda > 0.0 ? std::sqrt(p.lambda) : 0.0;
    const double log_max = log_density_unnormalized(p, peak);
    const double zmax = density_support(p);
    const double width = peak_width(p);

    // Breakpoints on [0, zmax] cluster around the peak so the first GK pass sees it.
    std::vector<double> breaks{0.0};
    for (double off : {-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0}) {
        const double b = peak + off * width;
        if (b > breaks.back() && b < zmax) breaks.push_back(b);
    }
    breaks.push_back(zmax);

    const double sub_tol = tol / 4.0;
    // Relative to the peak, in factored form: no cancellation between large logs.
    const double inv = 1.0 / (2.0 * p.sigma * p.sigma);
    auto density = [&](double z) {
        if (p.lambda > 0.0) {
            const double d = (z - peak) * (z + peak);
            return std::exp(-d * d * inv);
        }
        return std::exp(log_density_unnormalized(p, z) - log_max);
    };
    const auto mass = quad::integrate(density, breaks, sub_tol);

    if (n % 2 == 1) {
        // Signed integral over the symmetric support; vanishes up to rounding.
        std::vector<double> sym;
        for (auto it = breaks.rbegin(); it != breaks.rend(); ++it)
            if (*it > 0.0) sym.push_back(-*it);
        sym.insert(sym.end(), breaks.begin(), breaks.end());
        const auto odd = quad::integrate([&](double z) { return std::pow(z, n) * density(z); }, sym,
                                         sub_tol, sub_tol * std::pow(zmax, n) * mass.value);
        return {odd.value / (2.0 * mass.value), odd.error / (2.0 * mass.value), MomentMethod::quadrature};
    }

    const auto weighted = quad::integrate([&](double z) { return std::pow(z, n) * density(z); }, breaks, sub_tol);
    const double value = weighted.value / mass.value;
    const double rel = weighted.error / std::abs(weighted.value) + mass.error / mass.value;
    if (!(rel <= tol) || !std::isfinite(value))
        throw NumericalFailure("stationary_moment: error estimate above tolerance");
    return {value, rel * std::abs(value), MomentMethod::quadrature};
}

MomentResult second_moment_asymptotic(const ModelSpec& m) {
    if (!(m.sigma >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
    double value = 0.0;
    switch (m.kind) {
        case OperatorKind::swift_hohenberg:
            if (!(m.nu < 1.0)) throw std::invalid_argument("Swift-Hohenberg asymptotic needs nu < 1");
            value = 2.0 * m.sigma * m.sigma / (1.0 - m.nu);
            break;
        case OperatorKind::biharmonic:
            if (!(m.nu > 0.0)) throw std::invalid_argument("biharmonic asymptotic needs nu > 0");
            value = m.nu * (1.0 + m.sigma * m.sigma / (m.nu * m.nu));
            break;
        case OperatorKind::shifted: {
            const double lam = m.lambda();
            if (!(lam > 0.0)) throw std::invalid_argument("shifted asymptotic needs nu > mu^2");
            value = lam * (1.0 + m.sigma * m.sigma / (lam * lam));
            break;
        }
    }
    return {value, 0.0, MomentMethod::asymptotic};
}

}  // namespace noisestab
