#include "noisestab/thresholds.hpp"

#include <cmath>
#include <stdexcept>

#include "noisestab/errors.hpp"

namespace noisestab {

namespace {

double moment_tolerance(double tol) { return std::min(1e-10, 0.01 * tol); }

void check_grid(const std::vector<double>& grid, const char* what) {
    if (grid.empty()) throw std::invalid_argument(std::string(what) + " grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
            throw std::invalid_argument(std::string(what) + " grid must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument(std::string(what) + " grid must be strictly increasing");
    }
}

}  // namespace

double cubic_constant(double delta) {
    if (!(delta > 0.0 && delta < 0.25)) throw std::invalid_argument("delta must lie in (0, 1/4)");
    return 3.0 - 9.0 / (4.0 * (1.0 - delta));
}

double stability_ratio(const ModelSpec& m, double tol, const CriterionConstants& k) {
    if (!(m.nu > 0.0)) throw std::invalid_argument("stability_ratio needs nu > 0");
    const double eta = m.eta() + k.eta_correction;
    const auto moment = second_moment({m.lambda(), m.sigma}, moment_tolerance(tol));
    return k.c_delta * moment.value / eta;
}

double critical_sigma(ModelSpec m, double tol, const CriterionConstants& k) {
    if (!(m.nu > 0.0)) throw std::invalid_argument("critical_sigma needs nu > 0");
    if (m.kind == OperatorKind::swift_hohenberg && !(m.nu < 1.0))
        throw std::invalid_argument("critical_sigma (Swift-Hohenberg) needs nu in (0, 1)");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    auto excess = [&](double sigma) {
        m.sigma = sigma;
        return stability_ratio(m, tol, k) - 1.0;
    };
    // Walk up geometrically; the first sign change brackets the smallest root.
    double lo = 1e-6;
    if (excess(lo) >= 0.0) throw NumericalFailure("critical_sigma: criterion already met at sigma = 1e-6");
    double hi = lo;
    bool found = false;
    while (hi < 1e3) {
        const double next = std::min(hi * 1.25, 1e3);
        if (excess(next) >= 0.0) {
            lo = hi;
            hi = next;
            found = true;
            break;
        }
        hi = next;
    }
    if (!found) throw NumericalFailure("critical_sigma: no bracket in sigma in [1e-6, 1e3]");
    while ((hi - lo) > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) >= 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double small_noise_critical_sigma(const ModelSpec& m) {
    switch (m.kind) {
        case OperatorKind::swift_hohenberg: return std::sqrt(2.0 * m.nu / 3.0);
        case OperatorKind::biharmonic: return m.nu / std::sqrt(3.0);
        case OperatorKind::shifted: {
            const double lam = m.lambda();
            return std::sqrt(lam * (m.nu / 3.0 + m.mu * m.mu));
        }
    }
    return 0.0;
}

ThresholdCurve figure_curve(ModelSpec m, const std::vector<double>& sigma_grid, double tol,
                            const CriterionConstants& k) {
    check_grid(sigma_grid, "sigma");
    ThresholdCurve curve;
    curve.tol = tol;
    curve.small_noise_crossing = small_noise_critical_sigma(m);
    if (m.kind == OperatorKind::shifted && m.lambda() > 0.0)
        curve.feasibility_window = std::make_pair(small_noise_critical_sigma(m), std::sqrt(m.lambda()));

    for (double sigma : sigma_grid) {
        m.sigma = sigma;
        CurveRow row;
        row.abscissa = sigma;
        try {
            row.value = stability_ratio(m, tol, k);
        } catch (const std::exception& e) {
            row.ok = false;
            row.value = std::nan("");
            row.error = e.what();
        }
        try {
            row.small_noise = k.c_delta * second_moment_asymptotic(m).value / (m.eta() + k.eta_correction);
        } catch (const std::invalid_argument&) {
            row.small_noise = std::nan("");
        }
        curve.rows.push_back(row);
    }
    curve.model = m;

    for (std::size_t i = 1; i < curve.rows.size(); ++i) {
        const auto& a = curve.rows[i - 1];
        const auto& b = curve.rows[i];
        if (a.ok && b.ok && a.value < 1.0 && b.value >= 1.0) {
            ModelSpec probe = m;
            double lo = a.abscissa, hi = b.abscissa;
            while ((hi - lo) > tol * hi) {
                const double mid = 0.5 * (lo + hi);
                probe.sigma = mid;
                (stability_ratio(probe, tol, k) >= 1.0 ? hi : lo) = mid;
            }
            curve.crossing = 0.5 * (lo + hi);
            break;
        }
    }
    return curve;
}

ThresholdCurve critical_curve(ModelSpec m, const std::vector<double>& nu_grid, double tol,
                              const CriterionConstants& k) {
    check_grid(nu_grid, "nu");
    ThresholdCurve curve;
    curve.tol = tol;
    for (double nu : nu_grid) {
        m.nu = nu;
        CurveRow row;
        row.abscissa = nu;
        try {
            row.value = critical_sigma(m, tol, k);
        } catch (const std::exception& e) {
            row.ok = false;
            row.value = std::nan("");
            row.error = e.what();
        }
        row.small_noise = small_noise_critical_sigma(m);
        curve.rows.push_back(row);
    }
    curve.model = m;
    return curve;
}

}  // namespace noisestab
