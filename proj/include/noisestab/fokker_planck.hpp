#pragma once

#include "noisestab/model.hpp"

namespace noisestab {

/// Scalar SDE dz = (lambda z - z^3) dt + sigma dbeta.
struct ScalarSdeParams {
    double lambda = -1.0;
    double sigma = 0.1;
};

enum class MomentMethod { quadrature, asymptotic };

struct MomentResult {
    double value = 0.0;
    double est_error = 0.0;
    MomentMethod method = MomentMethod::quadrature;
};

/// -(zeta^4 - 2 lambda zeta^2) / (2 sigma^2), the stationary log-density up to a constant.
double log_density_unnormalized(const ScalarSdeParams& p, double zeta);

/// Support half-width beyond which the log-density has dropped 50 below its maximum.
double density_support(const ScalarSdeParams& p);

/// E z^n under the stationary density, by adaptive quadrature with relative
/// error <= tol. Odd n returns the exact symmetric value 0 computed as the
/// signed integral (useful as a diagnostic).
MomentResult stationary_moment(const ScalarSdeParams& p, int n, double tol);

inline MomentResult second_moment(const ScalarSdeParams& p, double tol) {
    return stationary_moment(p, 2, tol);
}

/// Closed-form small-noise leading terms for E z^2 exactly as printed in the
/// source analysis: 2 sigma^2 / (1 - nu) for Swift-Hohenberg,
/// nu (1 + sigma^2 / nu^2) for the biharmonic operator, and
/// lambda (1 + sigma^2 / lambda^2) with lambda = nu - mu^2 for the shifted one.
MomentResult second_moment_asymptotic(const ModelSpec& m);

}  // namespace noisestab
