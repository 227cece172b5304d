#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "noisestab/model.hpp"
#include "noisestab/sde.hpp"
#include "noisestab/spectral.hpp"
#include "noisestab/weights.hpp"

namespace noisestab {

/// Fourier symbol of A on the grid wavenumbers; entry 0 is lambda.
Eigen::VectorXd operator_symbol(const ModelSpec& m, const FourierGrid& fourier);

/// Exponential-Euler stepper for du = (A u - u^3) dt + sigma dbeta on a
/// periodic grid, with 2/3-rule dealiasing. The linear part and the
/// stochastic convolution on the constant mode are propagated exactly.
class SpdeStepper {
public:
    SpdeStepper(const ModelSpec& model, const Grid& grid, double dt, bool nonlinear = true);

    const FourierGrid& fourier() const { return fourier_; }
    const Eigen::VectorXd& symbol() const { return symbol_; }
    double dt() const { return dt_; }
    /// dt * max |a_k| over retained modes.
    double stiffness() const;

    /// Projects a field onto the retained modes.
    Spectrum project(const Field& f) const;
    /// One step in place; dW is the Brownian increment over the step.
    void step(Spectrum& state, double dW) const;
    Field to_field(const Spectrum& state) const { return fourier_.inverse(state); }
    /// Spatial mean of the field, i.e. the k = 0 coefficient.
    double constant_mode(const Spectrum& state) const {
        return state[0].real() / static_cast<double>(fourier_.size());
    }

private:
    ModelSpec model_;
    FourierGrid fourier_;
    double dt_;
    bool nonlinear_;
    Eigen::VectorXd symbol_;
    Eigen::VectorXd propagator_;
    Eigen::VectorXd phi_;
    double noise_scale_;
};

struct SimulationOptions {
    double record_interval = 0.05;      ///< norm series sampling
    double snapshot_interval = 0.0;     ///< 0 keeps initial and final field only
    double pullback_time = 0.0;         ///< 0 uses default_pullback_time(lambda)
    bool nonlinear = true;
};

/// One member of a simulation: norm series in L^2_rho.
struct NormSeries {
    std::vector<double> u_norm;     ///< ||u||
    std::vector<double> v_norm;     ///< ||u - z||
    std::vector<double> mean;       ///< constant mode of u
};

struct SpdeTrajectory {
    ModelSpec model;
    Grid grid;
    WeightSpec weight;
    double dt = 0.0;
    std::uint64_t seed = 0;

    std::vector<double> times;
    std::vector<double> z;             ///< stationary solution at the record times
    std::vector<double> z_sq_integral; ///< int_0^t z^2 ds (trapezoid on the step lattice)
    std::vector<NormSeries> members;
    /// max_{i<j} ||u_i - u_j||_rho at the record times (ensembles of two or more).
    std::vector<double> max_pairwise_distance;

    std::vector<double> snapshot_times;
    std::vector<std::vector<Field>> snapshots;  ///< [member][snapshot]
    std::vector<std::string> warnings;
};

/// Simulates every initial condition on one shared noise path, in lockstep.
/// The stationary solution z is obtained by pullback over
/// options.pullback_time and then advanced with the constant-mode stepper on
/// the same increments, so v = u - z carries no noise. For sigma = 0, z = 0.
SpdeTrajectory simulate_ensemble(const ModelSpec& m, const Grid& g, const WeightSpec& w,
                                 const std::vector<Field>& ics, double T, double dt, std::uint64_t seed,
                                 const SimulationOptions& options = {});

inline SpdeTrajectory simulate(const ModelSpec& m, const Grid& g, const WeightSpec& w, const Field& ic,
                               double T, double dt, std::uint64_t seed, const SimulationOptions& options = {}) {
    return simulate_ensemble(m, g, w, {ic}, T, dt, seed, options);
}

struct SyncReport {
    SpdeTrajectory trajectory;  ///< distance series in trajectory.max_pairwise_distance
    double initial_distance = 0.0;
    double final_distance = 0.0;
    double ratio = 0.0;            ///< final / initial (0 if initial is 0)
    double rate = 0.0;             ///< slope of log D over the second half of the decay to 1e-12 D(0)
};

SyncReport synchronization_experiment(const ModelSpec& m, const Grid& g, const WeightSpec& w,
                                      const std::vector<Field>& ics, double T, double dt, std::uint64_t seed,
                                      const SimulationOptions& options = {});

struct BoundReport {
    bool satisfied = true;
    double max_violation = 0.0;  ///< largest lhs - rhs (<= 0 when satisfied)
    int samples = 0;
    int violations = 0;
};

/// log||v(t)||^2 - log||v(0)||^2 <= 2 eta t - 2 c_delta int_0^t z^2 ds + slack
/// at every recorded time of member `member`.
BoundReport gronwall_check(const SpdeTrajectory& traj, std::size_t member, double eta, double c_delta,
                           double slack = 1e-6);

/// ||v(t)||^2 <= e^{-t} ||v(0)||^2 + K at every recorded time.
BoundReport absorbing_check(const SpdeTrajectory& traj, std::size_t member, double K);

/// K = ||rho||_{L^1} (2 nu + C eta0 + 1)^2 / (4 delta).
double absorbing_radius_constant(const WeightSpec& w, double nu, double C, double eta0, double delta);

/// sup over the retained (dealiased) real trigonometric fields v of
/// <v, A v>_rho / <v, v>_rho for the discrete weighted inner product.
double weighted_numerical_range(const ModelSpec& m, const Grid& g, const WeightSpec& w);

/// Named initial conditions: "zero", "roll" (the k = 1 roll of the model, or of
/// Swift-Hohenberg at the same nu when the model has none), or "random" (a
/// smooth seeded field built from modes |k| <= 2, values of order one).
Field make_initial_condition(const std::string& name, const ModelSpec& m, const Grid& g, std::uint64_t seed);

/// Evaluates a cosine series sum_j a_j cos(j k x) on the grid points.
Field cosine_series_field(const Eigen::VectorXd& coefficients, double k, const Grid& g, double shift = 0.0);

}  // namespace noisestab
