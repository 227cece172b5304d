#pragma once

#include <optional>
#include <string>
#include <vector>

#include "noisestab/fokker_planck.hpp"
#include "noisestab/model.hpp"

namespace noisestab {

/// Constants entering the stabilization criterion E z^2 > eta / C_delta.
/// Defaults are the small-c, small-delta limits eta = nu, C_delta = 3/4.
struct CriterionConstants {
    double eta_correction = 0.0;   ///< eta = nu + eta_correction
    double c_delta = 0.75;
};

/// C_delta = 3 - 9 / (4 (1 - delta)) for 0 < delta < 1/4.
double cubic_constant(double delta);

/// C_delta * E z^2 / eta; > 1 means the attractor collapses to the stationary solution.
double stability_ratio(const ModelSpec& m, double tol, const CriterionConstants& k = {});

/// Smallest noise strength with stability_ratio == 1, by bracketing and bisection
/// to relative tolerance tol on sigma. Searches sigma in [1e-6, 1e3].
double critical_sigma(ModelSpec m, double tol, const CriterionConstants& k = {});

/// Where the printed small-noise formulas put the threshold:
/// sqrt(2 nu / 3) (Swift-Hohenberg), nu / sqrt(3) (biharmonic),
/// sqrt((nu - mu^2)(nu / 3 + mu^2)) (shifted).
double small_noise_critical_sigma(const ModelSpec& m);

struct CurveRow {
    double abscissa = 0.0;
    double value = 0.0;
    double small_noise = 0.0;
    bool ok = true;
    std::string error;
};

struct ThresholdCurve {
    ModelSpec model;
    double tol = 0.0;
    std::vector<CurveRow> rows;
    /// sigma where the measured curve crosses 1 (cross marker), if bracketed on the grid.
    std::optional<double> crossing;
    /// sigma where the small-noise curve equals 1 (circle marker).
    double small_noise_crossing = 0.0;
    /// Shifted operator only: the admissible window
    /// (nu - mu^2)(nu/3 + mu^2) < sigma^2 << nu - mu^2, as sigma bounds.
    std::optional<std::pair<double, double>> feasibility_window;
};

/// Tabulates stability_ratio over sigma_grid next to the ratio predicted by
/// second_moment_asymptotic. Rows whose moment fails are kept and flagged.
ThresholdCurve figure_curve(ModelSpec m, const std::vector<double>& sigma_grid, double tol,
                            const CriterionConstants& k = {});

/// nu -> critical_sigma(nu) over nu_grid (value column), small-noise formula alongside.
ThresholdCurve critical_curve(ModelSpec m, const std::vector<double>& nu_grid, double tol,
                              const CriterionConstants& k = {});

}  // namespace noisestab
