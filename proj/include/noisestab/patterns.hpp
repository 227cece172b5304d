#pragma once

#include <vector>

#include <Eigen/Dense>

#include "noisestab/model.hpp"
#include "noisestab/weights.hpp"

namespace noisestab {

/// Open interval of wavenumbers.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double k) const { return k > lower && k < upper; }
};

/// {k > 0 : symbol(k) > 0}. Empty for nu <= 0.
std::vector<Interval> unstable_band(const ModelSpec& m);

/// Even 2 pi / k periodic stationary solution of A u - u^3 = 0 (sigma = 0),
/// as cosine coefficients u(x) = sum_j a_j cos(j k x).
struct RollBranch {
    double k = 1.0;
    double nu = 0.0;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd period_values;  ///< u at 16 M equispaced points of one period
    double amplitude = 0.0;         ///< half peak-to-peak
    double residual = 0.0;          ///< max |R_j| of the Galerkin residual
    int iterations = 0;
    bool trivial = false;           ///< Newton collapsed onto u = 0
};

/// Newton iteration on M cosine coefficients, seeded with a_1 = 2 sqrt(symbol(k)/3)
/// (or a small seed outside the band). Throws NumericalFailure on divergence.
RollBranch roll_branch(const ModelSpec& m, double k, int modes = 32, double tol = 1e-12);

/// max_x |A u - u^3| on a periodic grid, derivatives taken spectrally.
double stationary_residual(const ModelSpec& m, const Grid& g, const Field& u);

/// Spatially constant stationary states +-sqrt(lambda), empty when lambda <= 0.
std::vector<double> constant_states(const ModelSpec& m);

/// int_R rho(x) u(x)^2 dx for a 2 pi / k periodic cosine series.
double periodic_weighted_norm_sq(const Eigen::VectorXd& coefficients, double k, const WeightSpec& w);

struct DiameterConstants {
    double C = 1.0;       ///< constant of the upper estimate
    double kappa = 1.0;   ///< eta0 = kappa c^2
    double delta = 0.1;
};

struct DiameterBounds {
    double lower = 0.0;
    double upper = 0.0;  ///< conjectured-scaling probe, not a proven bound
};

/// Lower bound: distance between +-sqrt(nu) (biharmonic) or between the k = 1
/// roll and its half-period translate (Swift-Hohenberg), in L^2_rho.
/// Upper: 2 [C (eta0^2 + nu^2)]^{1/4} ||rho||_{L^1}^{1/2} / sqrt(delta).
DiameterBounds diameter_bounds(const ModelSpec& m, const WeightSpec& w, const DiameterConstants& k = {});

}  // namespace noisestab
