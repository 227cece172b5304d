#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "noisestab/fokker_planck.hpp"

namespace noisestab {

/// Brownian increments on the lattice t_n = n dt, n in [first, first + count).
///
/// Increments for n >= 0 come from a forward stream and those for n < 0 from
/// a separate backward stream (drawn in the order -1, -2, ...), both seeded
/// from `seed`. Extending a path in either direction therefore never changes
/// increments it already had, which keeps pullback runs reproducible.
class NoisePath {
public:
    NoisePath(std::uint64_t seed, double dt, double t_begin, double t_end);

    std::uint64_t seed() const { return seed_; }
    double dt() const { return dt_; }
    double origin_time() const { return static_cast<double>(first_) * dt_; }
    double end_time() const { return static_cast<double>(first_ + count()) * dt_; }
    std::int64_t first_index() const { return first_; }
    std::int64_t count() const { return static_cast<std::int64_t>(increments_.size()); }

    /// Increment over [t_n, t_n + dt], n a global lattice index.
    double at(std::int64_t n) const;
    /// Step index of time t (which must be on the lattice).
    std::int64_t index_of(double t) const;
    std::span<const double> increments() const { return increments_; }

    /// Path on the coarser lattice dt * factor whose increments are sums of this
    /// path's increments. The time window must be a multiple of the new dt.
    NoisePath coarsened(int factor) const;

private:
    NoisePath() = default;

    std::uint64_t seed_ = 0;
    double dt_ = 0.0;
    std::int64_t first_ = 0;
    std::vector<double> increments_;
};

struct SdePath {
    Eigen::VectorXd times;
    Eigen::VectorXd values;
    ScalarSdeParams params;
};

/// z + dt (lambda z - z^3) + sigma dW.
inline double euler_maruyama_step(const ScalarSdeParams& p, double z, double dt, double dW) {
    return z + dt * (p.lambda * z - z * z * z) + p.sigma * dW;
}

/// Exponential-Euler step: exact propagation of lambda z and of the stochastic
/// convolution, explicit cubic. This is the k = 0 restriction of the SPDE stepper.
double exponential_euler_step(const ScalarSdeParams& p, double z, double dt, double dW);

/// (e^{a dt} - 1) / a, with the a -> 0 limit.
inline double phi1(double a, double dt) { return a == 0.0 ? dt : std::expm1(a * dt) / a; }

enum class ScalarScheme { euler_maruyama, exponential_euler };

/// Integrates from noise.origin_time() for duration T (a multiple of dt).
/// Requires dt <= 0.01 / max(1, |lambda|) for the Euler-Maruyama scheme.
SdePath integrate_sde(const ScalarSdeParams& p, double z0, const NoisePath& noise, double T,
                      ScalarScheme scheme);

inline SdePath euler_maruyama(const ScalarSdeParams& p, double z0, const NoisePath& noise, double T) {
    return integrate_sde(p, z0, noise, T, ScalarScheme::euler_maruyama);
}

struct PullbackResult {
    double value = 0.0;
    double gap = 0.0;
    /// |upper - lower| after every step, starting with the initial gap.
    std::vector<double> gaps;
};

/// Runs the SDE from t = -T_back to 0 on `noise` starting at +Z0 and -Z0,
/// Z0 = 10 max(1, sqrt|lambda|, sigma), and returns the common value at t = 0.
/// Coarse steps are split so the explicit cubic stays order preserving at
/// |z| <= Z0. Throws NumericalFailure if the final gap is not below 1e-8.
PullbackResult pullback_stationary(const ScalarSdeParams& p, const NoisePath& noise, double T_back,
                                   ScalarScheme scheme = ScalarScheme::exponential_euler);

/// Default pullback horizon 100 / max(|lambda|, 0.1).
inline double default_pullback_time(double lambda) { return 100.0 / std::max(std::abs(lambda), 0.1); }

/// Mean of z^2 over samples with t >= burn_in.
double time_average_square(const SdePath& path, double burn_in);

struct TimeAverage {
    double mean = 0.0;
    double std_error = 0.0;  ///< batch-means estimate
    int batches = 0;
};

/// time_average_square together with a batch-means standard error.
TimeAverage time_average_square_with_error(const SdePath& path, double burn_in, int batches = 50);

}  // namespace noisestab
