#include "noisestab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "noisestab/errors.hpp"
#include "noisestab/fokker_planck.hpp"
#include "noisestab/inequalities.hpp"
#include "noisestab/io.hpp"
#include "noisestab/patterns.hpp"
#include "noisestab/sde.hpp"
#include "noisestab/spde.hpp"
#include "noisestab/thresholds.hpp"

namespace noisestab {

namespace fs = std::filesystem;

namespace {

// Keys shared with the config file; a flag given on the command line wins.
const std::vector<std::string> kConfigKeys = {"model", "nu", "sigma", "mu", "c", "q", "L", "N", "dt", "T", "seed", "tol"};

struct Common {
    std::string config_path;
    std::string out_dir;
    std::map<std::string, std::string> flags;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "flat key = value configuration file");
    cmd->add_option("--out", c.out_dir, "output directory (default $NOISESTAB_OUT_DIR or .)");
    for (const auto& key : kConfigKeys) cmd->add_option("--" + key, c.flags[key], "overrides config key " + key);
}

ExperimentConfig resolve(const Common& c, CLI::App* cmd) {
    ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
    for (const auto& key : kConfigKeys)
        if (cmd->count("--" + key) > 0) apply_config_value(cfg, key, c.flags.at(key));
    cfg.validate();
    return cfg;
}

// Output files of one command; the manifest is written last and lists them all.
class Run {
public:
    Run(std::string command, const Common& c) : dir_(c.out_dir.empty() ? default_output_dir() : fs::path(c.out_dir)) {
        fs::create_directories(dir_);
        manifest_.command = std::move(command);
        manifest_.tool_version = tool_version();
        manifest_.started = utc_timestamp();
    }
    fs::path file(const std::string& name) {
        const fs::path p = dir_ / name;
        manifest_.outputs.push_back(p);
        return p;
    }
    void add(const std::vector<fs::path>& paths) {
        for (const auto& p : paths)
            if (std::find(manifest_.outputs.begin(), manifest_.outputs.end(), p) == manifest_.outputs.end())
                manifest_.outputs.push_back(p);
    }
    RunManifest& manifest() { return manifest_; }
    fs::path finish() {
        manifest_.finished = utc_timestamp();
        const fs::path p = dir_ / (manifest_.command + ".manifest.json");
        manifest_.write(p);
        return p;
    }

private:
    fs::path dir_;
    RunManifest manifest_;
};

double plain_sigma(const ExperimentConfig& cfg) {
    double value = 0.0, factor = 1.0;
    if (parse_sigma_expr(cfg.sigma_expr, value, factor))
        throw ConfigError("sigma: 'auto' is only meaningful for spde-sync");
    return value;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = points == 1 ? hi : lo + (hi - lo) * i / (points - 1);
    return g;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i)
        g[i] = points == 1 ? hi : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
    return g;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical laboratory for noise stabilization of Swift-Hohenberg type equations", "noisestab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());

    Common common;
    std::function<int()> action;

    // moments
    auto* moments = app.add_subcommand("moments", "stationary moment E z^n of dz = (lambda z - z^3) dt + sigma dbeta");
    add_common(moments, common);
    double lambda = -1.0;
    int order = 2;
    moments->add_option("--lambda", lambda, "drift coefficient lambda")->required();
    moments->add_option("--order", order, "moment order n")->check(CLI::Range(0, 16));
    moments->callback([&] {
        action = [&] {
            const auto cfg = resolve(common, moments);
            const ScalarSdeParams p{lambda, plain_sigma(cfg)};
            const auto r = stationary_moment(p, order, cfg.tol);
            Run run("moments", common);
            {
                CsvWriter csv(run.file("moments.csv"), {"lambda", "sigma", "order", "value", "est_error"});
                csv.row({p.lambda, p.sigma, double(order), r.value, r.est_error});
            }
            run.manifest().parameters = {{"lambda", lambda}, {"sigma", p.sigma}, {"order", order}, {"tol", cfg.tol}};
            run.finish();
            out << format_double(r.value) << '\n';
            return 0;
        };
    });

    // threshold
    auto* threshold = app.add_subcommand("threshold", "critical noise strength sigma* where the stability ratio reaches 1");
    add_common(threshold, common);
    threshold->callback([&] {
        action = [&] {
            const auto cfg = resolve(common, threshold);
            const double s = critical_sigma(cfg.model, cfg.tol);
            ModelSpec at = cfg.model;
            at.sigma = s;
            const double ratio = stability_ratio(at, cfg.tol);
            const double approx = small_noise_critical_sigma(cfg.model);
            Run run("threshold", common);
            {
                CsvWriter csv(run.file("threshold.csv"), {"nu", "sigma_star", "ratio_at_sigma_star", "small_noise_sigma_star"});
                csv.row({cfg.model.nu, s, ratio, approx});
            }
            run.manifest().parameters = cfg.to_json();
            run.finish();
            out << "sigma* = " << format_double(s) << "  (stability ratio " << format_double(ratio)
                << ", small-noise formula " << format_double(approx) << ")\n";
            return 0;
        };
    });

    // figure
    auto* figure = app.add_subcommand("figure", "stability-ratio curve over sigma, or the critical curve over nu");
    add_common(figure, common);
    std::string curve = "ratio";
    double sigma_max = 2.5, sigma_min = 0.0, nu_min = 1e-4, nu_max = 0.9;
    int points = 150;
    bool log_spacing = false;
    figure->add_option("--curve", curve, "ratio (sigma -> ratio) or critical (nu -> sigma*)")
        ->check(CLI::IsMember({"ratio", "critical"}));
    figure->add_option("--sigma-min", sigma_min, "first sigma (default sigma-max / points)");
    figure->add_option("--sigma-max", sigma_max, "last sigma");
    figure->add_option("--nu-min", nu_min, "first nu of the critical curve");
    figure->add_option("--nu-max", nu_max, "last nu of the critical curve");
    figure->add_option("--points", points, "grid points")->check(CLI::Range(2, 100000));
    figure->add_flag("--log", log_spacing, "geometric grid");
    figure->callback([&] {
        action = [&] {
            const auto cfg = resolve(common, figure);
            Run run("figure", common);
            ThresholdCurve c;
            if (curve == "ratio") {
                const double lo = sigma_min > 0.0 ? sigma_min : sigma_max / points;
                if (!(lo < sigma_max)) throw ConfigError("sigma-min must be below sigma-max");
                c = figure_curve(cfg.model, log_spacing ? log_grid(lo, sigma_max, points) : linear_grid(lo, sigma_max, points),
                                 cfg.tol);
                std::vector<std::string> header = {"sigma", "ratio", "small_noise"};
                const bool window = c.feasibility_window.has_value();
                const auto [w_lo, w_hi] = c.feasibility_window.value_or(std::pair{NAN, NAN});
                if (window) header.insert(header.end(), {"window_lower", "window_upper"});
                CsvWriter csv(run.file("figure.csv"), header);
                for (const auto& r : c.rows) {
                    std::vector<double> row = {r.abscissa, r.ok ? r.value : NAN, r.small_noise};
                    if (window) row.insert(row.end(), {w_lo, w_hi});
                    csv.row(row);
                }
            } else {
                if (!(nu_min > 0.0 && nu_min < nu_max)) throw ConfigError("need 0 < nu-min < nu-max");
                c = critical_curve(cfg.model, log_spacing ? log_grid(nu_min, nu_max, points) : linear_grid(nu_min, nu_max, points),
                                   cfg.tol);
                CsvWriter csv(run.file("figure.csv"), {"nu", "sigma_star", "small_noise_sigma_star"});
                for (const auto& r : c.rows) csv.row({r.abscissa, r.ok ? r.value : NAN, r.small_noise});
            }
            run.manifest().parameters = cfg.to_json();
            run.manifest().parameters.update({{"curve", curve}, {"sigma_min", sigma_min}, {"sigma_max", sigma_max},
                                              {"nu_min", nu_min}, {"nu_max", nu_max}, {"points", points},
                                              {"log", log_spacing}});
            run.finish();
            int failed = 0;
            for (const auto& r : c.rows)
                if (!r.ok) ++failed;
            if (curve == "ratio") {
                out << "crossing: " << (c.crossing ? format_double(*c.crossing) : std::string("none on grid"))
                    << "  small-noise formula: " << format_double(c.small_noise_crossing) << '\n';
            }
            if (failed > 0) err << failed << " grid point(s) failed and were written as nan\n";
            return 0;
        };
    });

    // sde
    auto* sde = app.add_subcommand("sde", "sample path of the scalar SDE and its time average of z^2");
    add_common(sde, common);
    double z0 = 0.0, burn_in = 100.0, record_dt = 0.0;
    std::string scheme = "em";
    bool from_pullback = false;
    sde->add_option("--lambda", lambda, "drift coefficient lambda")->required();
    sde->add_option("--z0", z0, "initial value");
    sde->add_option("--scheme", scheme, "em (Euler-Maruyama) or expeuler")->check(CLI::IsMember({"em", "expeuler"}));
    sde->add_option("--burn-in", burn_in, "time discarded before averaging");
    sde->add_option("--record", record_dt, "path output spacing (0: no path file)");
    sde->add_flag("--pullback", from_pullback, "start from the pullback stationary value at t = 0");
    sde->callback([&] {
        action = [&] {
            const auto cfg = resolve(common, sde);
            const ScalarSdeParams p{lambda, plain_sigma(cfg)};
            const ScalarScheme s = scheme == "em" ? ScalarScheme::euler_maruyama : ScalarScheme::exponential_euler;
            const double back = from_pullback ? std::ceil(default_pullback_time(lambda) / cfg.dt) * cfg.dt : 0.0;
            const NoisePath noise(cfg.seed, cfg.dt, -back, cfg.T);
            const double start = from_pullback ? pullback_stationary(p, noise, back, s).value : z0;
            // Integrate forward from t = 0 on the n >= 0 increments.
            const NoisePath forward(cfg.seed, cfg.dt, 0.0, cfg.T);
            const SdePath path = integrate_sde(p, start, forward, cfg.T, s);
            const auto avg = time_average_square_with_error(path, burn_in);
            const auto quad = second_moment(p, std::min(cfg.tol, 1e-8));

            Run run("sde", common);
            if (record_dt > 0.0) {
                CsvWriter csv(run.file("sde_path.csv"), {"t", "z"});
                const auto stride = std::max<Eigen::Index>(1, std::llround(record_dt / cfg.dt));
                for (Eigen::Index i = 0; i < path.times.size(); i += stride) csv.row({path.times[i], path.values[i]});
            }
            {
                CsvWriter csv(run.file("sde_average.csv"),
                              {"lambda", "sigma", "dt", "T", "burn_in", "time_average", "std_error", "batches", "quadrature"});
                csv.row({p.lambda, p.sigma, cfg.dt, cfg.T, burn_in, avg.mean, avg.std_error, double(avg.batches), quad.value});
            }
            run.manifest().parameters = cfg.to_json();
            run.manifest().parameters.update({{"lambda", lambda}, {"z0", start}, {"scheme", scheme},
                                              {"burn_in", burn_in}, {"pullback", from_pullback}});
            run.manifest().seeds = {cfg.seed};
            run.finish();
            out << "time average z^2 = " << format_double(avg.mean) << " +- " << format_double(avg.std_error)
                << "  (quadrature " << format_double(quad.value) << ")\n";
            return 0;
        };
    });

    // spde-sync
    auto* sync = app.add_subcommand("spde-sync", "synchronization of several initial conditions on one noise path");
    add_common(sync, common);
    std::vector<std::string> ics = {"zero", "roll", "random"};
    double record_interval = 0.5, pullback = 0.0;
    sync->add_option("--ics", ics, "initial conditions (zero, roll, random)")->delimiter(',');
    sync->add_option("--record", record_interval, "norm series spacing");
    sync->add_option("--pullback-time", pullback, "pullback horizon for z (0: default)");
    sync->callback([&] {
        action = [&] {
            auto cfg = resolve(common, sync);
            double sigma = 0.0, factor = 1.0, sigma_star = NAN;
            if (parse_sigma_expr(cfg.sigma_expr, sigma, factor)) {
                sigma_star = critical_sigma(cfg.model, std::min(cfg.tol, 1e-8));
                sigma = factor * sigma_star;
            }
            ModelSpec m = cfg.model;
            m.sigma = sigma;
            std::vector<Field> fields;
            for (const auto& name : ics) fields.push_back(make_initial_condition(name, m, cfg.grid, cfg.seed));
            SimulationOptions opts;
            opts.record_interval = record_interval;
            opts.pullback_time = pullback;
            const auto rep = synchronization_experiment(m, cfg.grid, cfg.weight, fields, cfg.T, cfg.dt, cfg.seed, opts);
            const auto& tr = rep.trajectory;

            const double ratio = sigma > 0.0 ? stability_ratio(m, std::min(cfg.tol, 1e-8)) : 0.0;
            const double eta = std::max(m.eta(), weighted_numerical_range(m, cfg.grid, cfg.weight));
            const NumericalRangeConstants nr;
            const DiameterConstants dc;
            const double K = absorbing_radius_constant(cfg.weight, m.nu, nr.C, nr.eta0(cfg.weight.c), dc.delta);
            int gronwall_violations = 0, absorbing_violations = 0;
            for (std::size_t i = 0; i < tr.members.size(); ++i) {
                gronwall_violations += gronwall_check(tr, i, eta, CriterionConstants{}.c_delta).violations;
                absorbing_violations += absorbing_check(tr, i, K).violations;
            }

            Run run("spde-sync", common);
            {
                std::vector<std::string> header = {"t", "distance", "z", "z_sq_integral"};
                for (std::size_t i = 0; i < ics.size(); ++i) {
                    header.push_back("u_norm_" + ics[i]);
                    header.push_back("v_norm_" + ics[i]);
                }
                CsvWriter csv(run.file("spde_sync_series.csv"), header);
                for (std::size_t n = 0; n < tr.times.size(); ++n) {
                    std::vector<double> row = {tr.times[n], tr.max_pairwise_distance[n], tr.z[n], tr.z_sq_integral[n]};
                    for (const auto& s : tr.members) {
                        row.push_back(s.u_norm[n]);
                        row.push_back(s.v_norm[n]);
                    }
                    csv.row(row);
                }
            }
            {
                CsvWriter csv(run.file("spde_sync_report.csv"),
                              {"sigma", "sigma_star", "stability_ratio", "initial_distance", "final_distance",
                               "distance_ratio", "rate", "eta", "K", "gronwall_violations", "absorbing_violations"});
                csv.row({sigma, sigma_star, ratio, rep.initial_distance, rep.final_distance, rep.ratio, rep.rate, eta, K,
                         double(gronwall_violations), double(absorbing_violations)});
            }
            for (std::size_t i = 0; i < ics.size(); ++i) {
                const auto& snaps = tr.snapshots[i];
                if (snaps.empty()) continue;
                run.add(write_field_dump(run.file("spde_sync_final_" + ics[i] + ".csv"), snaps.back(), cfg.grid,
                                         {{"member", ics[i]}, {"t", tr.snapshot_times.back()}}));
            }
            run.manifest().parameters = cfg.to_json();
            run.manifest().parameters.update({{"sigma_resolved", sigma}, {"ics", ics},
                                              {"record", record_interval}, {"pullback_time", pullback}});
            run.manifest().seeds = {cfg.seed};
            run.finish();
            for (const auto& w : tr.warnings) err << "warning: " << w << '\n';
            out << "sigma = " << format_double(sigma) << "  D(T)/D(0) = " << format_double(rep.ratio)
                << "  rate = " << format_double(rep.rate) << '\n';
            return 0;
        };
    });

    // verify-inequalities
    auto* verify = app.add_subcommand("verify-inequalities", "randomized checks of the weighted functional inequalities");
    add_common(verify, common);
    int samples = 1000;
    NumericalRangeConstants nrc;
    double tolerance = 1e-8;
    verify->add_option("--samples", samples, "test functions")->check(CLI::PositiveNumber);
    verify->add_option("--kappa", nrc.kappa, "eta0 = kappa c^2");
    verify->add_option("--C", nrc.C, "numerical-range constant");
    verify->add_option("--tolerance", tolerance, "allowed normalized negative margin");
    verify->callback([&] {
        action = [&] {
            const auto cfg = resolve(common, verify);
            TestFunctionSpec spec;
            spec.seed = cfg.seed;
            const auto rep = run_inequality_suite(cfg.weight, spec, samples, nrc, tolerance);
            Run run("verify-inequalities", common);
            {
                CsvWriter csv(run.file("inequalities.csv"), {"c", "q", "samples", "kappa", "C", "min_numerical_range",
                                                        "min_interpolation", "min_cubic"});
                csv.row({cfg.weight.c, cfg.weight.q, double(samples), nrc.kappa, nrc.C, rep.min_numerical_range,
                         rep.min_interpolation, rep.min_cubic});
            }
            bool failed = false;
            const std::pair<const char*, const std::optional<Field>*> worst[] = {
                {"numerical_range", &rep.worst_numerical_range},
                {"interpolation", &rep.worst_interpolation},
                {"cubic", &rep.worst_cubic}};
            for (const auto& [name, field] : worst) {
                if (!field->has_value()) continue;
                failed = true;
                run.add(write_field_dump(run.file(std::string("inequalities_worst_") + name + ".csv"), **field, spec.grid,
                                         {{"inequality", name}}));
            }
            run.manifest().parameters = cfg.to_json();
            run.manifest().parameters.update({{"samples", samples}, {"kappa", nrc.kappa}, {"C", nrc.C},
                                              {"tolerance", tolerance}});
            run.manifest().seeds = {cfg.seed};
            run.finish();
            out << "min normalized margins: numerical range " << format_double(rep.min_numerical_range)
                << ", interpolation " << format_double(rep.min_interpolation) << ", cubic "
                << format_double(rep.min_cubic) << '\n';
            if (failed) {
                err << "inequality violated beyond tolerance; offending fields written next to the manifest\n";
                return 1;
            }
            return 0;
        };
    });

    // rolls
    auto* rolls = app.add_subcommand("rolls", "roll branch amplitude over nu");
    add_common(rolls, common);
    double k = 1.0;
    int modes = 32;
    double roll_nu_min = 0.01, roll_nu_max = 0.1;
    int roll_points = 10;
    rolls->add_option("--k", k, "wavenumber");
    rolls->add_option("--modes", modes, "cosine modes")->check(CLI::Range(16, 4096));
    rolls->add_option("--nu-min", roll_nu_min, "first nu");
    rolls->add_option("--nu-max", roll_nu_max, "last nu");
    rolls->add_option("--points", roll_points, "nu grid points")->check(CLI::Range(1, 100000));
    rolls->callback([&] {
        action = [&] {
            const auto cfg = resolve(common, rolls);
            Run run("rolls", common);
            {
                CsvWriter csv(run.file("rolls.csv"), {"nu", "k", "amplitude", "leading_order", "residual", "iterations"});
                for (double nu : linear_grid(roll_nu_min, roll_nu_max, roll_points)) {
                    ModelSpec m = cfg.model;
                    m.nu = nu;
                    m.sigma = 0.0;
                    const auto b = roll_branch(m, k, modes, 1e-12);
                    const double s = m.symbol(k);
                    csv.row({nu, k, b.amplitude, s > 0.0 ? 2.0 * std::sqrt(s / 3.0) : 0.0, b.residual, double(b.iterations)});
                }
            }
            run.manifest().parameters = cfg.to_json();
            run.manifest().parameters.update({{"k", k}, {"modes", modes}, {"nu_min", roll_nu_min},
                                              {"nu_max", roll_nu_max}, {"points", roll_points}});
            const auto manifest = run.finish();
            out << "wrote " << manifest.string() << '\n';
            return 0;
        };
    });

    // diameter
    auto* diameter = app.add_subcommand("diameter", "lower and conjectured upper bounds on the attractor diameter");
    add_common(diameter, common);
    DiameterConstants dk;
    diameter->add_option("--C", dk.C, "constant of the upper estimate");
    diameter->add_option("--kappa", dk.kappa, "eta0 = kappa c^2");
    diameter->add_option("--delta", dk.delta, "delta of the upper estimate");
    diameter->callback([&] {
        action = [&] {
            const auto cfg = resolve(common, diameter);
            const auto b = diameter_bounds(cfg.model, cfg.weight, dk);
            Run run("diameter", common);
            {
                CsvWriter csv(run.file("diameter.csv"), {"nu", "c", "q", "lower", "upper"});
                csv.row({cfg.model.nu, cfg.weight.c, cfg.weight.q, b.lower, b.upper});
            }
            run.manifest().parameters = cfg.to_json();
            run.manifest().parameters.update({{"C", dk.C}, {"kappa", dk.kappa}, {"delta", dk.delta}});
            run.finish();
            out << "lower " << format_double(b.lower) << "  upper (conjectured scaling) " << format_double(b.upper) << '\n';
            return 0;
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << tool_version() << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        return action();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical_failure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return exit_numerical_failure;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace noisestab
