#include "noisestab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "noisestab/errors.hpp"

namespace noisestab {

namespace {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream,
                      0x5eedu};
    return std::mt19937_64(seq);
}

std::int64_t lattice_index(double t, double dt) {
    const double n = t / dt;
    const double r = std::round(n);
    if (std::abs(n - r) > 1e-6) throw std::invalid_argument("time is not a multiple of dt");
    return static_cast<std::int64_t>(r);
}

void require_finite(double z, std::int64_t step) {
    if (!std::isfinite(z)) throw NumericalFailure("SDE state became non-finite at step " + std::to_string(step));
}

}  // namespace

NoisePath::NoisePath(std::uint64_t seed, double dt, double t_begin, double t_end) : seed_(seed), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("noise: dt must be positive");
    first_ = lattice_index(t_begin, dt);
    const std::int64_t last = lattice_index(t_end, dt);
    if (last < first_) throw std::invalid_argument("noise: t_end before t_begin");
    increments_.resize(static_cast<std::size_t>(last - first_));

    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::sqrt(dt);
    if (last > 0) {
        auto rng = make_stream(seed, 0);
        for (std::int64_t n = 0; n < last; ++n) {
            const double draw = scale * normal(rng);
            if (n >= first_) increments_[static_cast<std::size_t>(n - first_)] = draw;
        }
    }
    if (first_ < 0) {
        auto rng = make_stream(seed, 1);
        normal.reset();
        for (std::int64_t n = -1; n >= first_; --n) {
            const double draw = scale * normal(rng);
            if (n < last) increments_[static_cast<std::size_t>(n - first_)] = draw;
        }
    }
}

double NoisePath::at(std::int64_t n) const {
    if (n < first_ || n >= first_ + count()) throw std::out_of_range("noise index outside path");
    return increments_[static_cast<std::size_t>(n - first_)];
}

std::int64_t NoisePath::index_of(double t) const { return lattice_index(t, dt_); }

NoisePath NoisePath::coarsened(int factor) const {
    if (factor < 1) throw std::invalid_argument("coarsening factor must be >= 1");
    if (first_ % factor != 0 || count() % factor != 0)
        throw std::invalid_argument("noise window is not a multiple of the coarse step");
    NoisePath coarse;
    coarse.seed_ = seed_;
    coarse.dt_ = dt_ * factor;
    coarse.first_ = first_ / factor;
    coarse.increments_.resize(increments_.size() / factor);
    for (std::size_t i = 0; i < coarse.increments_.size(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < factor; ++j) sum += increments_[i * factor + j];
        coarse.increments_[i] = sum;
    }
    return coarse;
}

double exponential_euler_step(const ScalarSdeParams& p, double z, double dt, double dW) {
    const double a = p.lambda;
    // Var of int_0^dt e^{a(dt-s)} dW(s) is phi1(2a, dt); same normal draw as dW.
    const double conv = std::sqrt(phi1(2.0 * a, dt) / dt) * dW;
    return std::exp(a * dt) * z - phi1(a, dt) * z * z * z + p.sigma * conv;
}

SdePath integrate_sde(const ScalarSdeParams& p, double z0, const NoisePath& noise, double T,
                      ScalarScheme scheme) {
    const double dt = noise.dt();
    if (scheme == ScalarScheme::euler_maruyama && dt > 0.01 / std::max(1.0, std::abs(p.lambda)) * (1 + 1e-12))
        throw std::invalid_argument("euler_maruyama: dt must be <= 0.01 / max(1, |lambda|)");
    const std::int64_t steps = lattice_index(T, dt);
    if (steps < 0 || steps > noise.count()) throw std::invalid_argument("integrate_sde: T exceeds noise path");

    SdePath path;
    path.params = p;
    path.times.resize(steps + 1);
    path.values.resize(steps + 1);
    const std::int64_t n0 = noise.first_index();
    double z = z0;
    path.times[0] = noise.origin_time();
    path.values[0] = z;
    for (std::int64_t i = 0; i < steps; ++i) {
        const double dW = noise.at(n0 + i);
        z = scheme == ScalarScheme::euler_maruyama ? euler_maruyama_step(p, z, dt, dW)
                                                   : exponential_euler_step(p, z, dt, dW);
        require_finite(z, i + 1);
        path.times[i + 1] = static_cast<double>(n0 + i + 1) * dt;
        path.values[i + 1] = z;
    }
    return path;
}

PullbackResult pullback_stationary(const ScalarSdeParams& p, const NoisePath& noise, double T_back,
                                   ScalarScheme scheme) {
    const double dt = noise.dt();
    const std::int64_t steps = lattice_index(T_back, dt);
    if (steps <= 0) throw std::invalid_argument("pullback: T_back must be positive");
    if (noise.first_index() > -steps || noise.first_index() + noise.count() < 0)
        throw std::invalid_argument("pullback: noise path does not cover [-T_back, 0]");

    const double z0 = 10.0 * std::max({1.0, std::sqrt(std::abs(p.lambda)), p.sigma});
    const int substeps = std::max(1, static_cast<int>(std::ceil(6.0 * z0 * z0 * dt)));
    const double h = dt / substeps;

    PullbackResult out;
    out.gaps.reserve(static_cast<std::size_t>(steps) + 1);
    double upper = z0, lower = -z0;
    out.gaps.push_back(upper - lower);
    for (std::int64_t n = -steps; n < 0; ++n) {
        const double dW = noise.at(n) / substeps;
        for (int s = 0; s < substeps; ++s) {
            if (scheme == ScalarScheme::euler_maruyama) {
                upper = euler_maruyama_step(p, upper, h, dW);
                lower = euler_maruyama_step(p, lower, h, dW);
            } else {
                upper = exponential_euler_step(p, upper, h, dW);
                lower = exponential_euler_step(p, lower, h, dW);
            }
        }
        require_finite(upper, n);
        require_finite(lower, n);
        out.gaps.push_back(std::abs(upper - lower));
    }
    out.gap = out.gaps.back();
    out.value = 0.5 * (upper + lower);
    if (!(out.gap < 1e-8))
        throw NumericalFailure("pullback did not converge: gap " + std::to_string(out.gap) + " after T_back = " +
                               std::to_string(T_back));
    return out;
}

double time_average_square(const SdePath& path, double burn_in) {
    return time_average_square_with_error(path, burn_in, 1).mean;
}

TimeAverage time_average_square_with_error(const SdePath& path, double burn_in, int batches) {
    if (path.times.size() == 0 || !(path.times[path.times.size() - 1] > burn_in))
        throw std::invalid_argument("time average: path ends before burn-in");
    Eigen::Index start = 0;
    while (start < path.times.size() && path.times[start] < burn_in) ++start;
    const Eigen::Index n = path.times.size() - start;
    if (n <= 0) throw std::invalid_argument("time average: empty window");
    const Eigen::VectorXd sq = path.values.tail(n).array().square();

    TimeAverage out;
    out.mean = sq.mean();
    out.batches = batches;
    if (batches > 1 && n >= 2 * batches) {
        const Eigen::Index len = n / batches;
        Eigen::VectorXd means(batches);
        for (int b = 0; b < batches; ++b) means[b] = sq.segment(b * len, len).mean();
        const double var = (means.array() - means.mean()).square().sum() / (batches - 1);
        out.std_error = std::sqrt(var / batches);
    }
    return out;
}

}  // namespace noisestab
