#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "noisestab/errors.hpp"

namespace noisestab {

/// Polynomial weight rho(x) = (1 + (c x)^2)^(-q/2).
struct WeightSpec {
    double c = 0.1;  ///< scale; small c means a slowly decaying weight
    double q = 2.0;  ///< decay exponent; rho is in L^1 iff q > 1

    void validate() const {
        if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("weight: c must be positive");
        if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("weight: q must be positive");
    }
    bool integrable() const { return q > 1.0; }
};

template <typename Scalar>
Scalar weight_eval(const WeightSpec& w, Scalar x) {
    using std::pow;
    const Scalar cx = Scalar(w.c) * x;
    return pow(Scalar(1) + cx * cx, Scalar(-0.5 * w.q));
}

/// rho and its first four derivatives at x, from a truncated Taylor expansion.
std::array<double, 5> weight_derivatives(const WeightSpec& w, double x);

/// ||rho||_{L^1(R)}. Requires q > 1.
double weight_mass(const WeightSpec& w, double tol = 1e-12);

/// Periodic truncation of the real line: N samples on [-L/2, L/2).
struct Grid {
    double length = 32.0 * M_PI;
    Eigen::Index size = 512;

    void validate() const {
        if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("grid: L must be positive");
        if (size < 8 || size % 2 != 0) throw std::invalid_argument("grid: N must be even and >= 8");
    }
    double dx() const { return length / static_cast<double>(size); }
    double x(Eigen::Index j) const { return -0.5 * length + static_cast<double>(j) * dx(); }
    Eigen::VectorXd points() const {
        return Eigen::VectorXd::LinSpaced(size, -0.5 * length, -0.5 * length + (size - 1) * dx());
    }
};

/// Sampled real field on a Grid.
using Field = Eigen::VectorXd;

void check_field(const Field& f, const Grid& g);

/// rho(x_j) on the grid, weight centered at x = 0.
Eigen::VectorXd weight_samples(const Grid& g, const WeightSpec& w);

/// (sum_j rho_j |f_j|^p dx)^(1/p) with precomputed weight samples.
template <typename Derived>
double weighted_lp_norm(const Eigen::MatrixBase<Derived>& f, const Eigen::VectorXd& rho, double dx,
                        double p) {
    if (p < 1.0) throw std::invalid_argument("weighted norm: p must be >= 1");
    if (!f.allFinite()) throw std::invalid_argument("weighted norm: non-finite field entries");
    if (p == 2.0) return std::sqrt(dx * (rho.array() * f.array().square()).sum());
    if (p == 4.0) return std::pow(dx * (rho.array() * f.array().square().square()).sum(), 0.25);
    return std::pow(dx * (rho.array() * f.array().abs().pow(p)).sum(), 1.0 / p);
}

template <typename Derived>
double weighted_lp_norm(const Eigen::MatrixBase<Derived>& f, const Grid& g, const WeightSpec& w,
                        double p) {
    if (f.size() != g.size) throw std::invalid_argument("weighted norm: field/grid size mismatch");
    return weighted_lp_norm(f, weight_samples(g, w), g.dx(), p);
}

/// [||f||, ||f'||, ..., ||f^(k)||] in L^2_rho, derivatives taken spectrally.
std::vector<double> weighted_hk_seminorms(const Field& f, const Grid& g, const WeightSpec& w, int k);

/// max over |x| <= x_max of |rho^(n)(x)| / rho(x) for n = 1..4, sampled densely.
std::array<double, 4> weight_derivative_ratios(const WeightSpec& w, double x_max, int samples = 20001);

}  // namespace noisestab
