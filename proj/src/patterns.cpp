#include "noisestab/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "noisestab/errors.hpp"
#include "noisestab/quadrature.hpp"
#include "noisestab/spectral.hpp"

namespace noisestab {

namespace {

// Cosine collocation on 4 M points of [0, 2 pi): exact projection of cubes of
// M-term cosine series.
struct CosineCollocation {
    explicit CosineCollocation(int modes) {
        const int points = 4 * modes;
        eval.resize(points, modes);
        project.resize(modes, points);
        for (int i = 0; i < points; ++i) {
            const double theta = 2.0 * M_PI * i / points;
            for (int j = 0; j < modes; ++j) {
                const double c = std::cos(j * theta);
                eval(i, j) = c;
                project(j, i) = (j == 0 ? 1.0 : 2.0) * c / points;
            }
        }
    }
    Eigen::MatrixXd eval;
    Eigen::MatrixXd project;
};

}  // namespace

std::vector<Interval> unstable_band(const ModelSpec& m) {
    if (!(m.nu > 0.0)) return {};
    const double r = std::sqrt(m.nu);
    double centre = 0.0;
    switch (m.kind) {
        case OperatorKind::swift_hohenberg: centre = 1.0; break;
        case OperatorKind::shifted: centre = m.mu; break;
        case OperatorKind::biharmonic: return {{0.0, std::pow(m.nu, 0.25)}};
    }
    // (centre - k^2)^2 < nu  <=>  centre - r < k^2 < centre + r
    const double hi = centre + r;
    if (hi <= 0.0) return {};
    const double lo = centre - r;
    return {{lo > 0.0 ? std::sqrt(lo) : 0.0, std::sqrt(hi)}};
}

RollBranch roll_branch(const ModelSpec& m, double k, int modes, double tol) {
    if (modes < 16) throw std::invalid_argument("roll_branch: need at least 16 modes");
    if (!(k > 0.0)) throw std::invalid_argument("roll_branch: k must be positive");
    const CosineCollocation col(modes);
    Eigen::VectorXd symbol(modes);
    for (int j = 0; j < modes; ++j) symbol[j] = m.symbol(j * k);

    Eigen::VectorXd a = Eigen::VectorXd::Zero(modes);
    a[1] = symbol[1] > 0.0 ? 2.0 * std::sqrt(symbol[1] / 3.0) : 0.1;

    RollBranch out;
    out.k = k;
    out.nu = m.nu;
    auto residual = [&](const Eigen::VectorXd& c) -> Eigen::VectorXd {
        const Eigen::VectorXd u = col.eval * c;
        return symbol.cwiseProduct(c) - col.project * u.array().cube().matrix();
    };

    Eigen::VectorXd r = residual(a);
    for (out.iterations = 0; out.iterations < 60 && r.lpNorm<Eigen::Infinity>() >= tol; ++out.iterations) {
        const Eigen::VectorXd u = col.eval * a;
        const Eigen::MatrixXd jac = Eigen::MatrixXd(symbol.asDiagonal()) -
                                    3.0 * col.project * (u.array().square().matrix().asDiagonal() * col.eval);
        a -= jac.partialPivLu().solve(r);
        r = residual(a);
        if (!a.allFinite() || !r.allFinite()) throw NumericalFailure("roll_branch: Newton iteration diverged");
    }
    out.residual = r.lpNorm<Eigen::Infinity>();
    if (!(out.residual < tol))
        throw NumericalFailure("roll_branch: Newton did not converge (residual " + std::to_string(out.residual) + ")");

    out.coefficients = a;
    const int fine = 16 * modes;
    Eigen::VectorXd values(fine);
    for (int i = 0; i < fine; ++i) {
        const double theta = 2.0 * M_PI * i / fine;
        double s = 0.0;
        for (int j = 0; j < modes; ++j) s += a[j] * std::cos(j * theta);
        values[i] = s;
    }
    out.period_values = values;
    out.amplitude = 0.5 * (values.maxCoeff() - values.minCoeff());
    out.trivial = a.lpNorm<Eigen::Infinity>() < 1e-10;
    return out;
}

double stationary_residual(const ModelSpec& m, const Grid& g, const Field& u) {
    check_field(u, g);
    const FourierGrid fourier(g);
    Spectrum s = fourier.forward(u);
    for (Eigen::Index j = 0; j < s.size(); ++j) s[j] *= m.symbol(fourier.wavenumbers()[j]);
    const Field au = fourier.inverse(s);
    return (au.array() - u.array().cube()).abs().maxCoeff();
}

std::vector<double> constant_states(const ModelSpec& m) {
    const double lam = m.lambda();
    if (!(lam > 0.0)) return {};
    return {-std::sqrt(lam), std::sqrt(lam)};
}

double periodic_weighted_norm_sq(const Eigen::VectorXd& coefficients, double k, const WeightSpec& w) {
    w.validate();
    if (!w.integrable()) throw std::invalid_argument("weighted norm over R needs q > 1");
    auto u = [&](double x) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < coefficients.size(); ++j) s += coefficients[j] * std::cos(j * k * x);
        return s;
    };
    // Truncate at c X = 20 with breakpoints every half period. Beyond X, u^2 is
    // its mean plus cosines cos(w x); the mean uses the exact tail mass and each
    // cosine the asymptotic expansion of int_X^inf rho cos(w x) dx.
    const double half_period = M_PI / k;
    const double X = std::ceil(20.0 / w.c / half_period) * half_period;
    std::vector<double> breaks;
    for (double x = 0.0; x <= X + 0.5 * half_period; x += half_period) breaks.push_back(x);
    breaks.back() = X;
    const auto core = quad::integrate([&](double x) { return weight_eval(w, x) * u(x) * u(x); }, breaks, 1e-12);
    const auto core_mass = quad::integrate([&](double x) { return weight_eval(w, x); }, breaks, 1e-13);
    const double tail_mass = 0.5 * weight_mass(w) - core_mass.value;
    const auto d = weight_derivatives(w, X);
    auto cosine_tail = [&](double om) {
        const double s = std::sin(om * X), c = std::cos(om * X);
        return -d[0] * s / om - d[1] * c / (om * om) + d[2] * s / std::pow(om, 3) + d[3] * c / std::pow(om, 4);
    };
    // u^2 = sum_{i,j} a_i a_j (cos((i-j) k x) + cos((i+j) k x)) / 2
    const Eigen::Index M = coefficients.size();
    double tail = 0.0;
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = 0; j < M; ++j) {
            const double aa = 0.5 * coefficients[i] * coefficients[j];
            if (aa == 0.0) continue;
            for (Eigen::Index n : {i - j, i + j}) {
                const double om = std::abs(static_cast<double>(n)) * k;
                tail += aa * (n == 0 ? tail_mass : cosine_tail(om));
            }
        }
    return 2.0 * (core.value + tail);
}

DiameterBounds diameter_bounds(const ModelSpec& m, const WeightSpec& w, const DiameterConstants& k) {
    if (!(m.nu > 0.0)) throw std::invalid_argument("diameter_bounds needs nu > 0");
    const double mass = weight_mass(w);
    DiameterBounds b;
    if (m.kind == OperatorKind::swift_hohenberg) {
        const auto roll = roll_branch(m, 1.0);
        // u and its half-period translate -u are both stationary.
        b.lower = 2.0 * std::sqrt(periodic_weighted_norm_sq(roll.coefficients, 1.0, w));
    } else {
        b.lower = 2.0 * std::sqrt(m.lambda() > 0.0 ? m.lambda() : 0.0) * std::sqrt(mass);
    }
    const double eta0 = k.kappa * w.c * w.c;
    b.upper = 2.0 * std::pow(k.C * (eta0 * eta0 + m.nu * m.nu), 0.25) * std::sqrt(mass / k.delta);
    return b;
}

}  // namespace noisestab
