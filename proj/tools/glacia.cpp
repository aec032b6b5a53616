#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "glacia/asymptotics.hpp"
#include "glacia/config.hpp"
#include "glacia/csv.hpp"
#include "glacia/errors.hpp"
#include "glacia/experiments.hpp"

#ifndef GLACIA_DEFAULT_CONFIG
#define GLACIA_DEFAULT_CONFIG "config/paper-reduced.json"
#endif

namespace {

using nlohmann::json;
using namespace glacia;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitFail = 2;
constexpr int kExitConfig = 3;

struct Globals {
    std::string config_path = GLACIA_DEFAULT_CONFIG;
    std::string output;
    bool json_out = false;
    bool dimensional = false;
};

void emit(const Globals& g, const std::string& text) {
    if (g.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(g.output);
    if (!out) throw ConfigError("cannot write " + g.output);
    out << text;
}

std::string fmt(double v) { return format_double(v); }

std::string line(const std::string& key, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-24s %s\n", key.c_str(), fmt(v).c_str());
    return buf;
}

int cmd_analyze(const Globals& g, double theta_min, double theta_max, int grid,
                const std::string& nullcline_csv) {
    const Config cfg = load_config(g.config_path);
    CriticalPointOptions opts;
    opts.grid_cells = grid;
    const CriticalPointSearch s = find_critical_points(cfg.full, theta_min, theta_max, opts);
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
    json arr = json::array();
    for (const auto& p : s.points) arr.push_back(to_json(p));
    emit(g, arr.dump(2) + "\n");

    if (!nullcline_csv.empty()) {
        CsvTable t;
        t.header = {"theta", "h", "k_plus", "k_minus"};
        constexpr int n = 400;
        for (int i = 0; i <= n; ++i) {
            const double th = theta_min + (theta_max - theta_min) * i / n;
            std::vector<std::optional<double>> row{th, std::nullopt, std::nullopt, std::nullopt};
            try {
                row[1] = theta_nullcline(th, cfg.full);
            } catch (const Error&) {
            }
            if (lambda_nullcline_exists(th, cfg.full)) {
                row[2] = lambda_nullcline(th, LambdaBranch::Plus, cfg.full);
                row[3] = lambda_nullcline(th, LambdaBranch::Minus, cfg.full);
            }
            t.rows.push_back(std::move(row));
        }
        std::ofstream out(nullcline_csv);
        if (!out) throw ConfigError("cannot write " + nullcline_csv);
        write_csv(out, t);
    }
    return kExitOk;
}

int cmd_reduce(const Globals& g) {
    const Config cfg = load_config(g.config_path);
    emit(g, to_json(cfg.reduced()).dump(2) + "\n");
    return kExitOk;
}

int cmd_assumptions(const Globals& g, std::optional<double> nu) {
    const Config cfg = load_config(g.config_path);
    ReducedParams rp = cfg.reduced();
    if (nu) rp.nu = *nu;
    const AssumptionReport r = check_assumptions(rp);
    if (g.json_out) {
        emit(g, to_json(r).dump(2) + "\n");
    } else {
        std::ostringstream os;
        auto flag = [&](const char* name, bool ok) {
            os << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        };
        flag("f(x-) > g(x-)", r.fold_minus_above);
        flag("f(x+) < g(x+)", r.fold_plus_below);
        flag("single critical point between the folds", r.unique_critical);
        flag("g'(x_c) > f'(x_c) > 0", r.unstable);
        flag("nu > nu_c", r.limit_cycle);
        if (r.critical) {
            os << line("x_c", r.critical->x_c) << line("nu_c", r.critical->nu_c);
        }
        os << line("nu", r.nu);
        emit(g, os.str());
    }
    return r.all() ? kExitOk : kExitFail;
}

int cmd_simulate(const Globals& g, std::optional<double> nu, std::optional<double> mu,
                 double t_span, int samples, const std::string& model, double theta0,
                 double lambda0) {
    const Config cfg = load_config(g.config_path);
    CsvTable t;
    if (model == "full") {
        FullParams p = cfg.full;
        if (mu) p.mu = *mu;
        t = run_timeseries(p, {theta0, lambda0}, t_span, samples, g.dimensional, cfg.scales,
                           cfg.integrator);
    } else if (model == "reduced") {
        ReducedParams rp = cfg.reduced();
        if (nu) rp.nu = *nu;
        t = run_timeseries(rp, t_span, samples, g.dimensional, cfg.scales, cfg.xi_sum(),
                           cfg.integrator);
    } else {
        throw ConfigError("--model must be 'reduced' or 'full'");
    }
    emit(g, to_csv_string(t));
    return kExitOk;
}

int cmd_period(const Globals& g, std::optional<double> nu) {
    const Config cfg = load_config(g.config_path);
    ReducedParams rp = cfg.reduced();
    if (nu) rp.nu = *nu;
    const PeriodExpansion pe = period_asymptotic(rp);
    const AmplitudeExpansion ae = amplitude_asymptotic(rp);
    const PeriodBounds pb = period_bounds(rp);
    const double bound = amplitude_bound(rp);
    auto yrs = [&](double t) { return reduced_time_to_years(t, cfg.xi_sum(), cfg.scales); };

    if (g.json_out) {
        json j = {{"nu", rp.nu},
                  {"leading", pe.leading},
                  {"correction_coeff", pe.correction_coeff},
                  {"airy_zeta", pe.airy_zeta},
                  {"total", pe.total(rp.nu)},
                  {"T_minus", pb.T_minus},
                  {"T_plus", pb.T_plus},
                  {"ax_leading", ae.ax_leading},
                  {"ax_correction", ae.ax_correction},
                  {"ax_total", ae.ax_total(rp.nu)},
                  {"ay_leading", ae.ay_leading},
                  {"amplitude_bound", bound}};
        if (g.dimensional) {
            j["years"] = {{"leading", yrs(pe.leading)},
                          {"total", yrs(pe.total(rp.nu))},
                          {"T_minus", yrs(pb.T_minus)},
                          {"T_plus", yrs(pb.T_plus)}};
        }
        emit(g, j.dump(2) + "\n");
        return kExitOk;
    }
    std::ostringstream os;
    os << line("nu", rp.nu) << line("leading", pe.leading)
       << line("correction_coeff", pe.correction_coeff) << line("total", pe.total(rp.nu))
       << line("T_minus", pb.T_minus) << line("T_plus", pb.T_plus)
       << line("ax_leading", ae.ax_leading) << line("ax_correction", ae.ax_correction)
       << line("ay_leading", ae.ay_leading) << line("amplitude_bound", bound);
    if (g.dimensional) {
        os << line("leading_years", yrs(pe.leading)) << line("total_years", yrs(pe.total(rp.nu)))
           << line("T_minus_years", yrs(pb.T_minus)) << line("T_plus_years", yrs(pb.T_plus));
    }
    emit(g, os.str());
    return kExitOk;
}

int cmd_sweep(const Globals& g, std::optional<double> nu_min, std::optional<double> nu_max,
              std::optional<int> points, bool no_measure, int workers) {
    const Config cfg = load_config(g.config_path);
    SweepSpec spec = cfg.sweep;
    if (nu_min) spec.nu_min = *nu_min;
    if (nu_max) spec.nu_max = *nu_max;
    if (points) spec.points = *points;
    if (no_measure) spec.measure = false;
    const ReducedParams rp = cfg.reduced();
    const SweepResult res = run_sweep(spec, rp, cfg.integrator, cfg.limit_cycle, workers);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    if (g.json_out) {
        json rows = json::array();
        for (const auto& r : res.rows) {
            auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(); };
            rows.push_back({{"nu", r.nu},
                            {"period_measured", opt(r.period_measured)},
                            {"period_asymptotic", r.period_asymptotic},
                            {"period_leading", r.period_leading},
                            {"t_minus", r.t_minus},
                            {"t_plus", r.t_plus},
                            {"amplitude_x_measured", opt(r.amplitude_x_measured)},
                            {"amplitude_y_measured", opt(r.amplitude_y_measured)},
                            {"converged", r.converged},
                            {"error", r.error}});
        }
        emit(g, rows.dump(2) + "\n");
    } else {
        emit(g, to_csv_string(sweep_table(res)));
    }
    return kExitOk;
}

int cmd_report(const Globals& g, std::uint64_t seed, int workers) {
    const Config cfg = load_config(g.config_path);
    ReportOptions opts;
    opts.seed = seed;
    opts.workers = workers;
    const Report rep = reproduce_report(cfg, opts, g.config_path);
    emit(g, g.json_out ? rep.to_json().dump(2) + "\n" : rep.to_text());
    return rep.all_pass() ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glacia: conceptual glacial-cycle model"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON configuration")->capture_default_str();
    app.add_option("--output", g.output, "write the result to this file instead of stdout");
    app.add_flag("--json", g.json_out, "JSON output");
    app.add_flag("--dimensional", g.dimensional, "physical units (years, kelvin, metres)");

    auto* analyze = app.add_subcommand("analyze", "critical points of the full model");
    double theta_min = 0.5, theta_max = 2.5;
    int grid = 512;
    std::string nullcline_csv;
    analyze->add_option("--theta-min", theta_min)->capture_default_str();
    analyze->add_option("--theta-max", theta_max)->capture_default_str();
    analyze->add_option("--grid", grid, "scan cells")->capture_default_str();
    analyze->add_option("--nullclines", nullcline_csv, "also write the nullclines as CSV");

    auto* reduce = app.add_subcommand("reduce", "reduced parameters as JSON");

    auto* assumptions = app.add_subcommand("assumptions", "check the relaxation assumptions");
    std::optional<double> nu;
    assumptions->add_option("--nu", nu);

    auto* simulate = app.add_subcommand("simulate", "time series as CSV");
    std::optional<double> mu;
    double t_span = 20.0;
    int samples = 1000;
    std::string model = "reduced";
    double theta0 = 1.4, lambda0 = 0.2;
    simulate->add_option("--nu", nu);
    simulate->add_option("--mu", mu, "full model only");
    simulate->add_option("--t-span", t_span, "duration in model time units")->capture_default_str();
    simulate->add_option("--samples", samples, "output intervals")->capture_default_str();
    simulate->add_option("--model", model, "reduced or full")->capture_default_str();
    simulate->add_option("--theta0", theta0, "full model initial temperature")->capture_default_str();
    simulate->add_option("--lambda0", lambda0, "full model initial extent")->capture_default_str();

    auto* period = app.add_subcommand("period", "asymptotic period, amplitudes and bounds");
    period->add_option("--nu", nu);

    auto* sweep = app.add_subcommand("sweep", "nu sweep of measured and asymptotic periods");
    std::optional<double> nu_min, nu_max;
    std::optional<int> points;
    bool no_measure = false;
    int workers = 0;
    sweep->add_option("--nu-min", nu_min);
    sweep->add_option("--nu-max", nu_max);
    sweep->add_option("--points", points);
    sweep->add_flag("--no-measure", no_measure, "asymptotic columns only");
    sweep->add_option("--workers", workers, "threads (default: GLACIA_WORKERS or all cores)");

    auto* report = app.add_subcommand("report", "evaluate every acceptance criterion");
    std::uint64_t seed = ReportOptions{}.seed;
    report->add_option("--seed", seed, "seed for the randomized checks")->capture_default_str();
    report->add_option("--workers", workers);

    for (auto* sub : {analyze, reduce, assumptions, simulate, period, sweep, report}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*analyze) return cmd_analyze(g, theta_min, theta_max, grid, nullcline_csv);
        if (*reduce) return cmd_reduce(g);
        if (*assumptions) return cmd_assumptions(g, nu);
        if (*simulate) return cmd_simulate(g, nu, mu, t_span, samples, model, theta0, lambda0);
        if (*period) return cmd_period(g, nu);
        if (*sweep) return cmd_sweep(g, nu_min, nu_max, points, no_measure, workers);
        if (*report) return cmd_report(g, seed, workers);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const AssumptionError& e) {
        std::cerr << "assumption violated: " << e.what() << "\n";
        return kExitFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
