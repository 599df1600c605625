// SPDX-License-Identifier: Apache-2.0
//
// kvwave: command-line front end for the coupled Kelvin-Voigt wave toolkit.
//
//   kvwave simulate  --config PATH [--out DIR] [--quiet]
//   kvwave spectrum  --config PATH [--out DIR] [--quiet]
//   kvwave resolvent --config PATH [--out DIR] [--quiet]
//   kvwave sweep     --config PATH [--out DIR] [--quiet]
//
// Exit codes: 0 success, 1 theorem-check verdict FAIL, 2 usage or
// computation error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "kvwave/kvwave.hpp"

namespace fs = std::filesystem;
using namespace kvwave;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_override;
    bool quiet = false;
};

struct Runtime {
    ExperimentConfig cfg;
    fs::path out_dir;
    bool quiet = false;

    void info(const std::string& line) const {
        if (!quiet) std::cout << line << "\n";
    }
};

Runtime make_runtime(const CliOptions& opts) {
    Runtime rt;
    rt.cfg = parse_config_file(opts.config_path);
    rt.quiet = opts.quiet;
    rt.out_dir = opts.out_override.empty() ? fs::path(rt.cfg.output.dir)
                                           : fs::path(opts.out_override);
    fs::create_directories(rt.out_dir);
    return rt;
}

double effective_dt(const NumericsParams& numerics, const Grid& grid) {
    return numerics.dt > 0.0 ? numerics.dt : std::min(grid.h, 0.02);
}

DiscreteGenerator build(const Runtime& rt) {
    Grid grid = build_grid(rt.cfg.system, rt.cfg.numerics.n);
    for (const auto& w : grid.warnings) rt.info("note: " + w);
    return assemble_generator(rt.cfg.system, grid);
}

int cmd_simulate(const Runtime& rt) {
    const DiscreteGenerator gen = build(rt);
    const StateVector s0 = make_initial_data(gen, rt.cfg.initial);
    const double dt = effective_dt(rt.cfg.numerics, gen.grid);

    rt.info("simulate: " + std::string(to_string(rt.cfg.system.case_label)) +
            " n=" + std::to_string(gen.grid.n) + " dt=" + format_number(dt) +
            " T=" + format_number(rt.cfg.numerics.T));
    const SimulationResult result =
        simulate(gen, s0, dt, rt.cfg.numerics.T, rt.cfg.numerics.sample_every);
    write_energy_csv(result.trace, (rt.out_dir / "energy.csv").string());

    const DecayFit fit = fit_decay_exponent(result.trace, rt.cfg.numerics.window_fraction);
    write_decay_fit(fit, (rt.out_dir / "decay_fit.txt").string());
    rt.info("alpha = " + format_number(fit.alpha) + "  residual = " +
            format_number(fit.residual) + "  window = [" + format_number(fit.t_lo) + ", " +
            format_number(fit.t_hi) + "]  domain_norm_sq = " +
            format_number(fit.domain_norm_sq));
    return 0;
}

int cmd_spectrum(const Runtime& rt) {
    const DiscreteGenerator gen = build(rt);
    const SpectrumReport report = eigenvalues(gen);
    write_spectrum_csv(report, (rt.out_dir / "spectrum.csv").string());

    const bool pass = report.max_real_part < 0.0 && report.on_axis_count == 0;
    std::cout << "verdict: strong stability: " << (pass ? "PASS" : "FAIL")
              << " (max Re lambda = " << format_number(report.max_real_part)
              << ", on-axis eigenvalues = " << report.on_axis_count << ")\n";
    return pass ? 0 : 1;
}

const char* ell_theory(CaseLabel c) {
    switch (c) {
        case CaseLabel::C1: return "theory: 0.5 for C1";
        case CaseLabel::C2: return "theory: none proven for C2";
        case CaseLabel::C3: return "theory: 2 for C3";
    }
    return "";
}

int cmd_resolvent(const Runtime& rt) {
    const DiscreteGenerator gen = build(rt);
    const double limit = resolution_limit(gen);
    const double hi =
        rt.cfg.resolvent.lambda_hi > 0.0 ? rt.cfg.resolvent.lambda_hi : limit;
    const std::vector<double> lambdas =
        log_spaced(rt.cfg.resolvent.lambda_lo, hi, rt.cfg.resolvent.points);

    ResolventProfile profile = resolvent_sweep(gen, lambdas);
    int beyond = 0, singular = 0;
    for (const auto& p : profile.points) {
        if (p.flag == ResolventProfile::Flag::beyond_limit) ++beyond;
        if (p.flag == ResolventProfile::Flag::singular) ++singular;
    }
    if (beyond > 0)
        rt.info("note: " + std::to_string(beyond) + " sweep points exceed the resolution limit " +
                format_number(limit) + " and are excluded from the fit");
    if (singular > 0)
        rt.info("note: " + std::to_string(singular) +
                " sweep points were numerically singular (recorded as inf)");

    try {
        profile.fitted_ell = fit_resolvent_exponent(profile);
    } catch (const InsufficientSpan& e) {
        rt.info(std::string("note: ") + e.what());
    }
    write_resolvent_csv(profile, (rt.out_dir / "resolvent.csv").string());
    std::cout << "ell_est = " << format_number(profile.fitted_ell) << " ("
              << ell_theory(rt.cfg.system.case_label) << ")\n";
    return 0;
}

int cmd_sweep(const Runtime& rt) {
    if (!rt.cfg.sweep)
        throw ParseError("sweep command requires a [sweep] section in the config");
    const SweepParams& sp = *rt.cfg.sweep;

    const char* metric_name = sp.metric == SweepParams::Metric::alpha ? "alpha"
                              : sp.metric == SweepParams::Metric::ell ? "ell"
                                                                      : nullptr;
    std::string csv = metric_name ? std::string("value,") + metric_name + ",ssc_satisfied\n"
                                  : std::string("value,ssc_satisfied\n");

    for (double value : sp.values) {
        ExperimentConfig cfg = rt.cfg;
        switch (sp.parameter) {
            case SweepParams::Parameter::c0: cfg.system.profile_c.value = value; break;
            case SweepParams::Parameter::b0: cfg.system.profile_b.value = value; break;
            case SweepParams::Parameter::d0: cfg.system.profile_d.value = value; break;
            case SweepParams::Parameter::n:
                if (value != static_cast<long long>(value) || value < 2)
                    throw BadParameters("sweep over n: values must be integers >= 2");
                cfg.numerics.n = static_cast<int>(value);
                break;
        }
        cfg.system = validate_config(cfg.system);
        const SscReport ssc = check_ssc(cfg.system);

        std::string row = format_number(value);
        if (metric_name) {
            const Grid grid = build_grid(cfg.system, cfg.numerics.n);
            const DiscreteGenerator gen = assemble_generator(cfg.system, grid);
            double metric = std::numeric_limits<double>::quiet_NaN();
            if (sp.metric == SweepParams::Metric::alpha) {
                const StateVector s0 = make_initial_data(gen, cfg.initial);
                const double dt = effective_dt(cfg.numerics, gen.grid);
                const SimulationResult result =
                    simulate(gen, s0, dt, cfg.numerics.T, cfg.numerics.sample_every);
                metric = fit_decay_exponent(result.trace, cfg.numerics.window_fraction).alpha;
            } else {
                const double limit = resolution_limit(gen);
                const double hi =
                    cfg.resolvent.lambda_hi > 0.0 ? cfg.resolvent.lambda_hi : limit;
                ResolventProfile profile = resolvent_sweep(
                    gen, log_spaced(cfg.resolvent.lambda_lo, hi, cfg.resolvent.points));
                metric = fit_resolvent_exponent(profile);
            }
            row += "," + format_number(metric);
        }
        row += ssc.satisfied ? ",true" : ",false";
        csv += row + "\n";
        rt.info("sweep value " + format_number(value) + ": ssc_satisfied = " +
                (ssc.satisfied ? "true" : "false"));
    }

    std::ofstream out((rt.out_dir / "sweep.csv").string(), std::ios::binary);
    if (!out) throw Error("cannot open sweep.csv for writing");
    out << csv;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical verification toolkit for locally coupled wave equations "
                 "with local Kelvin-Voigt damping"};
    app.require_subcommand(1);

    CliOptions opts;
    int (*handler)(const Runtime&) = nullptr;

    for (auto [name, desc, fn] :
         {std::tuple{"simulate", "run the dissipative dynamics and fit the energy decay exponent",
                     &cmd_simulate},
          std::tuple{"spectrum", "compute the generator spectrum and check strong stability",
                     &cmd_spectrum},
          std::tuple{"resolvent", "sweep resolvent norms along the imaginary axis and fit the growth exponent",
                     &cmd_resolvent},
          std::tuple{"sweep", "repeat an experiment across parameter values", &cmd_sweep}}) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", opts.config_path, "experiment config file (INI)")
            ->required();
        sub->add_option("--out", opts.out_override, "output directory (overrides [output] dir)");
        sub->add_flag("--quiet", opts.quiet, "suppress informational output");
        sub->callback([fn, &handler]() { handler = fn; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const Runtime rt = make_runtime(opts);
        return handler(rt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
