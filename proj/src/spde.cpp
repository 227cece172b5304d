#include "noisestab/spde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "noisestab/errors.hpp"
#include "noisestab/patterns.hpp"

namespace noisestab {

namespace {

std::int64_t steps_for(double T, double dt) {
    const double n = T / dt;
    const double r = std::round(n);
    if (std::abs(n - r) > 1e-6 || r < 0) throw std::invalid_argument("T must be a non-negative multiple of dt");
    return static_cast<std::int64_t>(r);
}

std::int64_t stride_for(double interval, double dt) {
    if (interval <= 0.0) return 0;
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(interval / dt)));
}

}  // namespace

Eigen::VectorXd operator_symbol(const ModelSpec& m, const FourierGrid& fourier) {
    return fourier.wavenumbers().unaryExpr([&](double k) { return m.symbol(k); });
}

SpdeStepper::SpdeStepper(const ModelSpec& model, const Grid& grid, double dt, bool nonlinear)
    : model_(model), fourier_(grid), dt_(dt), nonlinear_(nonlinear) {
    if (!(dt > 0.0)) throw std::invalid_argument("SPDE: dt must be positive");
    if (!(model.sigma >= 0.0)) throw std::invalid_argument("SPDE: sigma must be non-negative");
    symbol_ = operator_symbol(model_, fourier_);
    propagator_ = (symbol_ * dt_).array().exp();
    phi_ = symbol_.unaryExpr([&](double a) { return phi1(a, dt_); });
    noise_scale_ = model_.sigma * std::sqrt(phi1(2.0 * symbol_[0], dt_) / dt_);
}

double SpdeStepper::stiffness() const {
    return dt_ * (symbol_.array().abs() * fourier_.dealias_mask().array()).maxCoeff();
}

Spectrum SpdeStepper::project(const Field& f) const {
    check_field(f, fourier_.grid());
    Spectrum s = fourier_.forward(f);
    return s.cwiseProduct(fourier_.dealias_mask().cast<std::complex<double>>());
}

void SpdeStepper::step(Spectrum& state, double dW) const {
    const auto& mask = fourier_.dealias_mask();
    if (nonlinear_) {
        const Field u = fourier_.inverse(state);
        const Field cubic = -u.array().cube();
        const Spectrum n_hat = fourier_.forward(cubic);
        for (Eigen::Index m = 0; m < state.size(); ++m)
            state[m] = mask[m] * (propagator_[m] * state[m] + phi_[m] * n_hat[m]);
    } else {
        for (Eigen::Index m = 0; m < state.size(); ++m) state[m] *= mask[m] * propagator_[m];
    }
    state[0] += static_cast<double>(fourier_.size()) * noise_scale_ * dW;
    if (!state.allFinite()) throw NumericalFailure("SPDE state became non-finite");
}

SpdeTrajectory simulate_ensemble(const ModelSpec& m, const Grid& g, const WeightSpec& w,
                                 const std::vector<Field>& ics, double T, double dt, std::uint64_t seed,
                                 const SimulationOptions& options) {
    if (ics.empty()) throw std::invalid_argument("simulate: at least one initial condition required");
    g.validate();
    w.validate();
    const SpdeStepper stepper(m, g, dt, options.nonlinear);
    const std::int64_t steps = steps_for(T, dt);
    const ScalarSdeParams sde{m.lambda(), m.sigma};

    SpdeTrajectory traj;
    traj.model = m;
    traj.grid = g;
    traj.weight = w;
    traj.dt = dt;
    traj.seed = seed;
    if (stepper.stiffness() > 50.0)
        traj.warnings.push_back("dt * max|a_k| = " + std::to_string(stepper.stiffness()) + " exceeds 50");

    double back = 0.0;
    if (m.sigma > 0.0) {
        const double requested = options.pullback_time > 0.0 ? options.pullback_time : default_pullback_time(sde.lambda);
        back = std::ceil(requested / dt) * dt;
    }
    const NoisePath noise(seed, dt, -back, T);
    double z = m.sigma > 0.0 ? pullback_stationary(sde, noise, back).value : 0.0;

    std::vector<Spectrum> states;
    for (const auto& ic : ics) states.push_back(stepper.project(ic));
    traj.members.resize(ics.size());
    traj.snapshots.resize(ics.size());

    const Eigen::VectorXd rho = weight_samples(g, w);
    const double dx = g.dx();
    const std::int64_t record_stride = std::max<std::int64_t>(1, stride_for(options.record_interval, dt));
    const std::int64_t snapshot_stride = stride_for(options.snapshot_interval, dt);
    double z_integral = 0.0;
    std::vector<Field> fields(states.size());

    auto record = [&](std::int64_t n) {
        traj.times.push_back(static_cast<double>(n) * dt);
        traj.z.push_back(z);
        traj.z_sq_integral.push_back(z_integral);
        for (std::size_t i = 0; i < states.size(); ++i) {
            const Field u = stepper.to_field(states[i]);
            auto& s = traj.members[i];
            s.u_norm.push_back(weighted_lp_norm(u, rho, dx, 2.0));
            s.v_norm.push_back(weighted_lp_norm((u.array() - z).matrix(), rho, dx, 2.0));
            s.mean.push_back(stepper.constant_mode(states[i]));
            fields[i] = u;
        }
        if (fields.size() > 1) {
            double d = 0.0;
            for (std::size_t i = 0; i < fields.size(); ++i)
                for (std::size_t j = i + 1; j < fields.size(); ++j)
                    d = std::max(d, weighted_lp_norm(fields[i] - fields[j], rho, dx, 2.0));
            traj.max_pairwise_distance.push_back(d);
        }
    };
    auto snapshot = [&](std::int64_t n) {
        traj.snapshot_times.push_back(static_cast<double>(n) * dt);
        for (std::size_t i = 0; i < states.size(); ++i) traj.snapshots[i].push_back(stepper.to_field(states[i]));
    };

    record(0);
    snapshot(0);
    for (std::int64_t n = 0; n < steps; ++n) {
        const double dW = noise.at(n);
        for (auto& s : states) {
            try {
                stepper.step(s, dW);
            } catch (const NumericalFailure&) {
                throw NumericalFailure("SPDE blow-up at step " + std::to_string(n + 1));
            }
        }
        const double z_next = exponential_euler_step(sde, z, dt, dW);
        z_integral += 0.5 * dt * (z * z + z_next * z_next);
        z = z_next;
        const std::int64_t done = n + 1;
        if (done % record_stride == 0 || done == steps) record(done);
        if (done == steps || (snapshot_stride > 0 && done % snapshot_stride == 0)) snapshot(done);
    }
    return traj;
}

SyncReport synchronization_experiment(const ModelSpec& m, const Grid& g, const WeightSpec& w,
                                      const std::vector<Field>& ics, double T, double dt, std::uint64_t seed,
                                      const SimulationOptions& options) {
    if (ics.size() < 2) throw std::invalid_argument("synchronization needs at least two initial conditions");
    SyncReport report;
    report.trajectory = simulate_ensemble(m, g, w, ics, T, dt, seed, options);
    const auto& distance = report.trajectory.max_pairwise_distance;

    report.initial_distance = distance.front();
    report.final_distance = distance.back();
    report.ratio = report.initial_distance > 0.0 ? report.final_distance / report.initial_distance : 0.0;

    // Least-squares slope of log D over the second half of the decay window,
    // which ends where D first drops below 1e-12 D(0) (round-off floor).
    const auto& t = report.trajectory.times;
    std::size_t end = std::min(t.size(), distance.size());
    for (std::size_t i = 0; i < end; ++i)
        if (distance[i] <= 1e-12 * report.initial_distance) {
            end = i + 1;
            break;
        }
    double st = 0, sy = 0, stt = 0, sty = 0;
    int count = 0;
    for (std::size_t i = end / 2; i < end; ++i) {
        const double d = distance[i];
        if (!(d > std::numeric_limits<double>::min())) continue;
        const double y = std::log(d);
        st += t[i];
        sy += y;
        stt += t[i] * t[i];
        sty += t[i] * y;
        ++count;
    }
    if (count >= 2) report.rate = (count * sty - st * sy) / (count * stt - st * st);
    return report;
}

BoundReport gronwall_check(const SpdeTrajectory& traj, std::size_t member, double eta, double c_delta,
                           double slack) {
    const auto& v = traj.members.at(member).v_norm;
    BoundReport report;
    report.max_violation = -std::numeric_limits<double>::infinity();
    const double v0 = v.front();
    if (v0 == 0.0) return report;
    for (std::size_t i = 0; i < v.size(); ++i) {
        ++report.samples;
        const double lhs = 2.0 * (std::log(v[i]) - std::log(v0));
        const double rhs = 2.0 * eta * traj.times[i] - 2.0 * c_delta * traj.z_sq_integral[i];
        const double excess = lhs - rhs;
        report.max_violation = std::max(report.max_violation, excess);
        if (v[i] > 0.0 && excess > slack) {
            ++report.violations;
            report.satisfied = false;
        }
    }
    return report;
}

BoundReport absorbing_check(const SpdeTrajectory& traj, std::size_t member, double K) {
    const auto& v = traj.members.at(member).v_norm;
    BoundReport report;
    report.max_violation = -std::numeric_limits<double>::infinity();
    const double v0sq = v.front() * v.front();
    for (std::size_t i = 0; i < v.size(); ++i) {
        ++report.samples;
        const double excess = v[i] * v[i] - (std::exp(-traj.times[i]) * v0sq + K);
        report.max_violation = std::max(report.max_violation, excess);
        if (excess > 0.0) {
            ++report.violations;
            report.satisfied = false;
        }
    }
    return report;
}

double absorbing_radius_constant(const WeightSpec& w, double nu, double C, double eta0, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    const double b = 2.0 * nu + C * eta0 + 1.0;
    return weight_mass(w) * b * b / (4.0 * delta);
}

double weighted_numerical_range(const ModelSpec& m, const Grid& g, const WeightSpec& w) {
    g.validate();
    const FourierGrid fourier(g);
    const Eigen::Index modes = g.size / 3;
    const Eigen::Index dim = 1 + 2 * modes;
    const Eigen::VectorXd x = g.points();
    const double k0 = 2.0 * M_PI / g.length;

    Eigen::MatrixXd basis(g.size, dim);
    Eigen::VectorXd symbol(dim);
    basis.col(0).setOnes();
    symbol[0] = m.symbol(0.0);
    for (Eigen::Index j = 1; j <= modes; ++j) {
        const double k = k0 * static_cast<double>(j);
        basis.col(2 * j - 1) = (k * x.array()).cos();
        basis.col(2 * j) = (k * x.array()).sin();
        symbol[2 * j - 1] = symbol[2 * j] = m.symbol(k);
    }
    const Eigen::VectorXd weights = weight_samples(g, w) * g.dx();
    const Eigen::MatrixXd weighted = weights.asDiagonal() * basis;
    const Eigen::MatrixXd gram = basis.transpose() * weighted;
    const Eigen::MatrixXd form = gram * symbol.asDiagonal();
    const Eigen::MatrixXd sym = 0.5 * (form + form.transpose());

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalFailure("numerical range: eigen solver failed");
    return solver.eigenvalues().maxCoeff();
}

Field cosine_series_field(const Eigen::VectorXd& coefficients, double k, const Grid& g, double shift) {
    const Eigen::VectorXd x = g.points();
    Field f = Field::Zero(g.size);
    for (Eigen::Index j = 0; j < coefficients.size(); ++j)
        f += coefficients[j] * (static_cast<double>(j) * k * (x.array() - shift)).cos().matrix();
    return f;
}

Field make_initial_condition(const std::string& name, const ModelSpec& m, const Grid& g, std::uint64_t seed) {
    g.validate();
    if (name == "zero") return Field::Zero(g.size);
    if (name == "roll") {
        ModelSpec sh = m;
        sh.sigma = 0.0;
        if (!(m.symbol(1.0) > 0.0)) sh.kind = OperatorKind::swift_hohenberg;
        return cosine_series_field(roll_branch(sh, 1.0).coefficients, 1.0, g);
    }
    if (name == "random") {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x1c1cu};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(0.0, 1.0);
        const Eigen::ArrayXd x = g.points().array();
        const double k0 = 2.0 * M_PI / g.length;
        const int top = static_cast<int>(std::floor(2.0 / k0));
        Eigen::ArrayXd u = Eigen::ArrayXd::Constant(g.size, 0.5 * normal(rng));
        const double amp = 1.0 / std::sqrt(static_cast<double>(std::max(top, 1)));
        for (int j = 1; j <= top; ++j) {
            u += amp * normal(rng) * (j * k0 * x).cos();
            u += amp * normal(rng) * (j * k0 * x).sin();
        }
        return u.matrix();
    }
    throw std::invalid_argument("unknown initial condition '" + name + "' (expected zero, roll or random)");
}

}  // namespace noisestab
