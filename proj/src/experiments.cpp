#include "glacia/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#include "glacia/errors.hpp"

namespace glacia {

using nlohmann::json;

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GLACIA_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult run_sweep(const SweepSpec& spec, const ReducedParams& rp, const IntegratorConfig& cfg,
                      const LimitCycleOptions& lc, int workers) {
    spec.validate();
    cfg.validate();
    const SigmoidNullclines nc(rp);
    const PeriodExpansion pe = period_asymptotic(rp);
    const PeriodBounds pb = period_bounds(rp);
    const CriticalPoint cp = critical_point(rp);

    SweepResult result;
    if (spec.nu_min < cp.nu_c) {
        std::ostringstream os;
        os << "nu_min = " << spec.nu_min << " is below nu_c = " << cp.nu_c;
        result.warnings.push_back(os.str());
    }
    const std::vector<double> grid = spec.grid();
    result.rows.resize(grid.size());
    LimitCycleOptions opts = lc;
    opts.samples = 0;

    auto compute = [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        row.nu = grid[i];
        row.period_leading = pe.leading;
        row.period_asymptotic = pe.total(row.nu);
        row.t_minus = pb.T_minus;
        row.t_plus = pb.T_plus;
        if (!spec.measure) return;
        try {
            const LimitCycleMeasurement m = measure_limit_cycle(nc, row.nu, cfg, opts);
            row.period_measured = m.period;
            row.amplitude_x_measured = m.amplitude_x;
            row.amplitude_y_measured = m.amplitude_y;
            row.converged = m.converged;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    const int n_workers =
        std::min<int>(resolve_workers(workers), static_cast<int>(grid.size()));
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) compute(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < grid.size(); i = next++) compute(i);
            });
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& row : result.rows) {
        if (!row.error.empty()) {
            result.warnings.push_back("nu = " + format_double(row.nu) + ": " + row.error);
        }
    }
    return result;
}

CsvTable sweep_table(const SweepResult& result) {
    CsvTable t;
    t.header = {"nu",      "period_measured", "period_asymptotic", "period_leading",
                "t_minus", "t_plus",          "amplitude_x_measured", "amplitude_y_measured",
                "converged"};
    for (const auto& r : result.rows) {
        t.rows.push_back({r.nu, r.period_measured, r.period_asymptotic, r.period_leading,
                          r.t_minus, r.t_plus, r.amplitude_x_measured, r.amplitude_y_measured,
                          r.converged ? 1.0 : 0.0});
    }
    return t;
}

PowerLawFit fit_power_law(const SweepResult& result, double correction_coeff,
                          double noise_floor) {
    std::vector<double> lx, ly;
    for (const auto& r : result.rows) {
        if (!r.period_measured || !r.converged) continue;
        const double diff = *r.period_measured - r.period_leading;
        if (diff <= noise_floor) continue;
        lx.push_back(std::log(r.nu));
        ly.push_back(std::log(diff));
    }
    if (lx.size() < 2) throw AssumptionError("power-law fit needs at least two usable rows");
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    PowerLawFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.prefactor_ratio = std::exp(fit.intercept) / correction_coeff;
    fit.points_used = static_cast<int>(lx.size());
    return fit;
}

namespace {

/// Integrates and calls emit(t, y) at samples + 1 uniform times over [0, duration].
void sample_uniform(const PlanarField& field, const Vec2& seed, double duration, int samples,
                    const IntegratorConfig& cfg, const std::function<void(double, const Vec2&)>& emit) {
    if (duration < 0.0) throw DomainError("duration must be nonnegative");
    if (samples < 1) throw DomainError("at least one sample interval is required");
    emit(0.0, seed);
    if (duration == 0.0) return;
    Dopri5 stepper(field, 0.0, seed, cfg);
    int j = 1;
    auto time_of = [&](int k) { return k == samples ? duration : duration * k / samples; };
    while (j <= samples && stepper.step(duration)) {
        const DenseSegment& s = stepper.last_segment();
        while (j <= samples && time_of(j) <= s.t1()) {
            emit(time_of(j), j == samples && stepper.t() == duration ? stepper.y() : s.at(time_of(j)));
            ++j;
        }
    }
    for (; j <= samples; ++j) emit(time_of(j), stepper.y());
}

}  // namespace

CsvTable run_timeseries(const ReducedParams& rp, double duration, int samples, bool dimensional,
                        const DerivedScales& ds, double xi_sum, const IntegratorConfig& cfg,
                        std::optional<Vec2> seed) {
    const SigmoidNullclines nc(rp);
    if (!seed) {
        const FoldData fd = find_folds(rp);
        try {
            const CriticalPoint cp = critical_point(nc);
            seed = Vec2{cp.x_c + 0.1 * (fd.x_plus - fd.x_minus), cp.y_c};
        } catch (const AssumptionError&) {
            seed = Vec2{rp.x_alpha, nc.g(rp.x_alpha)};
        }
    }
    CsvTable t;
    t.header = dimensional ? std::vector<std::string>{"t_years", "T_kelvin", "L_meters"}
                           : std::vector<std::string>{"t", "x", "y"};
    sample_uniform(reduced_field(nc, rp.nu), *seed, duration, samples, cfg,
                   [&](double time, const Vec2& y) {
                       if (dimensional) {
                           t.rows.push_back({reduced_time_to_years(time, xi_sum, ds),
                                             temperature_kelvin(y[0], ds),
                                             extent_meters(xi_sum * y[1] / 8.0, ds)});
                       } else {
                           t.rows.push_back({time, y[0], y[1]});
                       }
                   });
    return t;
}

CsvTable run_timeseries(const FullParams& p, const FullState& seed, double duration, int samples,
                        bool dimensional, const DerivedScales& ds, const IntegratorConfig& cfg) {
    CsvTable t;
    t.header = dimensional ? std::vector<std::string>{"t_years", "T_kelvin", "L_meters"}
                           : std::vector<std::string>{"tau", "theta", "lambda"};
    sample_uniform(full_field(p), {seed.theta, seed.lambda}, duration, samples, cfg,
                   [&](double time, const Vec2& y) {
                       if (dimensional) {
                           t.rows.push_back({tau_to_years(time, ds), temperature_kelvin(y[0], ds),
                                             extent_meters(y[1], ds)});
                       } else {
                           t.rows.push_back({time, y[0], y[1]});
                       }
                   });
    return t;
}

ReducedParams random_admissible_reduced(std::mt19937_64& rng, const ReducedParams& base) {
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    constexpr SigmoidFamily kFamilies[] = {SigmoidFamily::Tanh, SigmoidFamily::Logistic,
                                           SigmoidFamily::Algebraic, SigmoidFamily::Erf};
    for (int attempt = 0; attempt < 10000; ++attempt) {
        ReducedParams rp = base;
        rp.sigmoid_family = kFamilies[std::uniform_int_distribution<int>(0, 3)(rng)];
        rp.c = uni(0.08, 0.2);
        rp.delta_alpha = uni(0.3, 0.9) * rp.c * sigmoid_max_deriv(rp.sigmoid_family);
        rp.b = uni(0.01, 0.05);
        rp.d = uni(0.3, 0.8);
        rp.x_alpha = uni(1.3, 1.5);
        rp.x_xi = rp.x_alpha + uni(-0.03, 0.03);
        rp.delta_xi = uni(0.01, 0.05);
        rp.a = rp.x_alpha + rp.b * (1.0 + uni(-0.2, 0.2) * rp.d);
        rp.nu = uni(1.0, 100.0);
        try {
            rp.validate();
            const AssumptionReport r = check_assumptions(rp);
            if (r.fold_minus_above && r.fold_plus_below && r.unique_critical && r.unstable) {
                rp.nu = std::max(rp.nu, 2.0 * r.critical->nu_c);
                return rp;
            }
        } catch (const Error&) {
        }
    }
    throw ConvergenceError("no admissible reduced parameter set found in 10000 draws");
}

RandomFullConfig random_full_with_critical_points(std::mt19937_64& rng, const FullParams& base) {
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    for (int attempt = 0; attempt < 10000; ++attempt) {
        RandomFullConfig rc;
        FullParams& p = rc.params;
        p = base;
        FeedbackParams& fb = p.feedback;
        fb.continental_mode = ContinentalMode::Sigmoid;
        fb.lambda_alpha = uni(0.05, 0.2);
        fb.delta_lambda = uni(0.02, 0.08);
        fb.alpha_minus = uni(0.5, 0.7);
        fb.alpha_plus = uni(0.15, 0.3);
        fb.theta_alpha = uni(1.3, 1.5);
        fb.delta_alpha = uni(0.03, 0.15);
        fb.xi_minus = uni(0.05, 0.15);
        fb.xi_plus = uni(0.3, 0.6);
        fb.theta_xi = fb.theta_alpha + uni(-0.05, 0.05);
        fb.delta_xi = uni(0.01, 0.05);
        p.mu = std::exp(uni(std::log(0.05), std::log(5.0)));
        p.kappa = KappaProfile::constant(uni(0.0, 0.03));
        try {
            fb.validate();
            const CriticalPointSearch s = find_critical_points(p, 0.8, 2.0);
            for (const auto& pt : s.points) {
                const double m0 = std::abs(pt.eigenvalues[0]);
                const double m1 = std::abs(pt.eigenvalues[1]);
                const double smallest_re =
                    std::min(std::abs(pt.eigenvalues[0].real()), std::abs(pt.eigenvalues[1].real()));
                if (pt.classification != StabilityClass::Degenerate &&
                    smallest_re >= 1e-3 * std::max(m0, m1) && pt.location.lambda > 1e-4 &&
                    pt.location.lambda < 0.9) {
                    rc.points.push_back(pt);
                }
            }
            if (!rc.points.empty() && s.warnings.empty()) return rc;
        } catch (const Error&) {
        }
    }
    throw ConvergenceError("no full-model configuration with critical points in 10000 draws");
}

std::string to_string(PerturbationOutcome o) {
    switch (o) {
        case PerturbationOutcome::Converged: return "converged";
        case PerturbationOutcome::Diverged: return "diverged";
        case PerturbationOutcome::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

PerturbationOutcome perturbation_outcome(const FullParams& p, const CriticalPointReport& point,
                                         double perturbation) {
    const Vec2 c{point.location.theta, point.location.lambda};
    const Vec2 start{c[0] + perturbation * 0.8, c[1] + perturbation * 0.6};
    double slowest = std::numeric_limits<double>::infinity();
    double fastest_growth = 0.0;
    for (const auto& ev : point.eigenvalues) {
        slowest = std::min(slowest, std::abs(ev.real()));
        fastest_growth = std::max(fastest_growth, ev.real());
    }
    const bool stable = is_stable(point.classification);
    const double horizon = stable ? 30.0 / slowest : 40.0 / fastest_growth;

    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-16;
    cfg.max_steps = 20'000'000;
    auto dist = [&](const Vec2& y) { return std::hypot(y[0] - c[0], y[1] - c[1]); };
    try {
        Dopri5 stepper(full_field(p), 0.0, start, cfg);
        while (stepper.step(horizon)) {
            if (dist(stepper.y()) > 1e3 * perturbation) return PerturbationOutcome::Diverged;
        }
        const double d_end = dist(stepper.y());
        if (d_end < 1e-3 * perturbation) return PerturbationOutcome::Converged;
        if (d_end > perturbation) return PerturbationOutcome::Diverged;
        return PerturbationOutcome::Inconclusive;
    } catch (const DomainError&) {
        return PerturbationOutcome::Diverged;
    }
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::NotApplicable: return "not applicable";
    }
    return "unknown";
}

bool Report::all_pass() const {
    return std::all_of(criteria.begin(), criteria.end(),
                       [](const CriterionResult& c) { return c.verdict != Verdict::Fail; });
}

json Report::to_json() const {
    json rows = json::array();
    for (const auto& c : criteria) {
        rows.push_back({{"id", c.id},
                        {"name", c.name},
                        {"target", c.target},
                        {"tolerance", c.tolerance},
                        {"computed", c.computed},
                        {"verdict", glacia::to_string(c.verdict)},
                        {"reason", c.reason},
                        {"seconds", c.seconds}});
    }
    return {{"source", source}, {"seed", seed}, {"all_pass", all_pass()}, {"criteria", rows}};
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "configuration: " << (source.empty() ? "(in memory)" : source) << "\n";
    os << "random seed: " << seed << "\n";
    for (const auto& c : criteria) {
        std::string tag = c.verdict == Verdict::Pass   ? "PASS"
                          : c.verdict == Verdict::Fail ? "FAIL"
                                                       : "N/A ";
        os << "[" << tag << "] " << c.id << ". " << c.name << "\n";
        os << "       target:   " << c.target << " (" << c.tolerance << ")\n";
        os << "       computed: " << c.computed.dump() << "\n";
        if (!c.reason.empty()) os << "       note:     " << c.reason << "\n";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", c.seconds);
        os << "       time:     " << buf << " s\n";
    }
    os << (all_pass() ? "all criteria passed\n" : "some criteria failed\n");
    return os.str();
}

namespace {

double airy_ai(double x) {
    // Maclaurin series; adequate for |x| up to about 5.
    constexpr double c1 = 0.355028053887817239260;
    constexpr double c2 = 0.258819403792806798405;
    const double x3 = x * x * x;
    double f = 1.0, g = x, tf = 1.0, tg = x;
    for (int k = 1; k < 200; ++k) {
        tf *= x3 / ((3.0 * k - 1.0) * (3.0 * k));
        tg *= x3 / ((3.0 * k) * (3.0 * k + 1.0));
        f += tf;
        g += tg;
        if (std::abs(tf) + std::abs(tg) < 1e-18 * (std::abs(f) + std::abs(g))) break;
    }
    return c1 * f - c2 * g;
}

double rel_err(double approx, double exact, double floor = 1e-8) {
    return std::abs(approx - exact) / std::max(std::abs(exact), floor);
}

double central(const std::function<double(double)>& fn, double x, double h) {
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

double years(double t, const Config& cfg) {
    return reduced_time_to_years(t, cfg.xi_sum(), cfg.scales);
}

/// Reduced Jacobian eigenvalue imaginary part at the critical point.
double hopf_frequency(const ReducedParams& rp, const CriticalPoint& cp) {
    const SigmoidNullclines nc(rp);
    const double sy = std::sqrt(cp.y_c);
    const double j11 = rp.nu * nc.df(cp.x_c), j12 = -rp.nu;
    const double j21 = sy * nc.dg(cp.x_c), j22 = -sy;
    const double tr = j11 + j22, det = j11 * j22 - j12 * j21;
    const double disc = det - 0.25 * tr * tr;
    if (!(disc > 0.0)) throw AssumptionError("critical point is not a focus");
    return std::sqrt(disc);
}

}  // namespace

Report reproduce_report(const Config& cfg, const ReportOptions& opts, const std::string& source) {
    Report rep;
    rep.source = source;
    rep.seed = opts.seed;
    std::mt19937_64 rng(opts.seed);

    auto run = [&](int id, std::string name, std::string target, std::string tol,
                   const std::function<void(CriterionResult&)>& body) {
        CriterionResult c;
        c.id = id;
        c.name = std::move(name);
        c.target = std::move(target);
        c.tolerance = std::move(tol);
        rng.seed(opts.seed + static_cast<std::uint64_t>(id));
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body(c);
        } catch (const std::exception& e) {
            c.verdict = Verdict::Fail;
            c.reason = e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.criteria.push_back(std::move(c));
    };

    std::optional<ReducedParams> base;
    std::string base_error;
    try {
        base = cfg.reduced();
    } catch (const std::exception& e) {
        base_error = e.what();
    }
    auto need_base = [&]() -> const ReducedParams& {
        if (!base) throw ConfigError("no reduced parameters: " + base_error);
        return *base;
    };

    run(1, "critical nu", "nu_c = 0.1", "nu_c in [0.05, 0.2]", [&](CriterionResult& c) {
        const CriticalPoint cp = critical_point(need_base());
        c.computed = {{"nu_c", cp.nu_c}, {"x_c", cp.x_c}, {"y_c", cp.y_c}};
        c.verdict = cp.nu_c >= 0.05 && cp.nu_c <= 0.2 ? Verdict::Pass : Verdict::Fail;
    });

    run(2, "period bounds", "T- = 95.8e3 yr, T+ = 125e3 yr",
        "T- in [81, 110]e3 yr, T+ in [106, 144]e3 yr", [&](CriterionResult& c) {
            const PeriodBounds pb = period_bounds(need_base());
            const double lo = years(pb.T_minus, cfg), hi = years(pb.T_plus, cfg);
            c.computed = {{"T_minus", pb.T_minus}, {"T_plus", pb.T_plus},
                          {"T_minus_years", lo}, {"T_plus_years", hi}};
            c.verdict = lo >= 81e3 && lo <= 110e3 && hi >= 106e3 && hi <= 144e3 ? Verdict::Pass
                                                                                : Verdict::Fail;
        });

    run(3, "period at nu = 10", "121e3 yr", "[103, 139]e3 yr", [&](CriterionResult& c) {
        ReducedParams rp = need_base();
        rp.nu = 10.0;
        LimitCycleOptions lc = cfg.limit_cycle;
        lc.samples = 0;
        const LimitCycleMeasurement m = measure_limit_cycle(rp, cfg.integrator, lc);
        const double y = years(m.period, cfg);
        c.computed = {{"period", m.period}, {"period_years", y}, {"converged", m.converged}};
        c.verdict = m.converged && y >= 103e3 && y <= 139e3 ? Verdict::Pass : Verdict::Fail;
    });

    run(4, "power law of the period correction", "slope -2/3",
        "slope within 0.05; asymptotic within 5% at nu = 100 and 1% at nu = 1e4",
        [&](CriterionResult& c) {
            const ReducedParams& rp = need_base();
            const CriticalPoint cp = critical_point(rp);
            if (cfg.sweep.nu_min < cp.nu_c) {
                c.verdict = Verdict::NotApplicable;
                c.reason = "sweep nu_min = " + format_double(cfg.sweep.nu_min) +
                           " lies below nu_c = " + format_double(cp.nu_c);
                return;
            }
            SweepSpec spec = cfg.sweep;
            spec.measure = true;
            const SweepResult sw = run_sweep(spec, rp, cfg.integrator, cfg.limit_cycle, opts.workers);
            const PeriodExpansion pe = period_asymptotic(rp);
            const PowerLawFit fit =
                fit_power_law(sw, pe.correction_coeff, 10.0 * cfg.limit_cycle.period_tol * pe.leading);

            auto measured_at = [&](double nu) {
                for (const auto& r : sw.rows) {
                    if (std::abs(r.nu / nu - 1.0) < 1e-9 && r.period_measured) return *r.period_measured;
                }
                ReducedParams q = rp;
                q.nu = nu;
                LimitCycleOptions lc = cfg.limit_cycle;
                lc.samples = 0;
                return measure_limit_cycle(q, cfg.integrator, lc).period;
            };
            const double p100 = measured_at(100.0), p1e4 = measured_at(1e4);
            const double e100 = std::abs(p100 - pe.total(100.0)) / p100;
            const double e1e4 = std::abs(p1e4 - pe.total(1e4)) / p1e4;
            json rows = json::array();
            for (const auto& r : sw.rows) {
                rows.push_back({{"nu", r.nu},
                                {"measured", r.period_measured ? json(*r.period_measured) : json()},
                                {"asymptotic", r.period_asymptotic}});
            }
            c.computed = {{"slope", fit.slope},
                          {"prefactor_ratio", fit.prefactor_ratio},
                          {"points_used", fit.points_used},
                          {"rel_error_nu_100", e100},
                          {"rel_error_nu_1e4", e1e4},
                          {"rows", rows}};
            c.verdict = std::abs(fit.slope + 2.0 / 3.0) <= 0.05 && e100 <= 0.05 && e1e4 <= 0.01
                            ? Verdict::Pass
                            : Verdict::Fail;
        });

    run(5, "period sandwich", "T- <= leading <= T+", "exact, calibrated + 50 random sets",
        [&](CriterionResult& c) {
            const ReducedParams& rp0 = need_base();
            int violations = 0;
            auto check = [&](const ReducedParams& rp) {
                const PeriodExpansion pe = period_asymptotic(rp);
                const PeriodBounds pb = period_bounds(rp);
                if (!(pb.T_minus <= pe.leading && pe.leading <= pb.T_plus)) ++violations;
                return json{{"T_minus", pb.T_minus}, {"leading", pe.leading}, {"T_plus", pb.T_plus}};
            };
            c.computed["calibrated"] = check(rp0);
            for (int i = 0; i < 50; ++i) check(random_admissible_reduced(rng, rp0));
            c.computed["violations"] = violations;
            c.verdict = violations == 0 ? Verdict::Pass : Verdict::Fail;
        });

    run(6, "critical point estimate", "error 3e-4 on the calibrated set",
        "error <= 1e-2; bound C (x+ - x-)^3 holds on 100 random sets", [&](CriterionResult& c) {
            const ReducedParams& rp0 = need_base();
            const double err0 =
                std::abs(critical_point_approx(rp0).estimate - critical_point(rp0).x_c);
            int violations = 0, corrected_violations = 0;
            json worst;
            for (int i = 0; i < 100; ++i) {
                const ReducedParams rp = random_admissible_reduced(rng, rp0);
                const CriticalPointEstimate est = critical_point_approx(rp);
                const double err = std::abs(est.estimate - critical_point(rp).x_c);
                if (!(err <= est.bound)) {
                    ++violations;
                    if (worst.is_null() || err / est.bound > worst["ratio"].get<double>()) {
                        worst = {{"error", err}, {"bound", est.bound}, {"ratio", err / est.bound},
                                 {"slope_gap", est.slope_gap}};
                    }
                }
                if (!(err <= est.bound / std::abs(est.slope_gap))) ++corrected_violations;
            }
            c.computed = {{"calibrated_error", err0},
                          {"bound_violations", violations},
                          {"bound_violations_divided_by_slope_gap", corrected_violations}};
            if (!worst.is_null()) c.computed["worst_violation"] = worst;
            c.verdict = err0 <= 1e-2 && violations == 0 ? Verdict::Pass : Verdict::Fail;
            if (violations > 0) {
                c.reason = "the stated bound omits the factor 1 / |g'(x_xi) - f'(x_alpha)| from "
                           "equating the two Taylor expansions; it fails when the tangent slopes "
                           "nearly coincide, while the divided bound holds in every case";
            }
        });

    run(7, "stability classification", "eigenvalues agree with simulation",
        "20 random full-model sets; tr J(mu_c) = 0 to 1e-9", [&](CriterionResult& c) {
            int points = 0, disagreements = 0, trace_checks = 0;
            double worst_trace = 0.0;
            for (int i = 0; i < 20; ++i) {
                const RandomFullConfig rc = random_full_with_critical_points(rng, cfg.full);
                for (const auto& pt : rc.points) {
                    ++points;
                    const PerturbationOutcome o = perturbation_outcome(rc.params, pt);
                    const PerturbationOutcome want = is_stable(pt.classification)
                                                         ? PerturbationOutcome::Converged
                                                         : PerturbationOutcome::Diverged;
                    if (o != want) ++disagreements;
                    if (pt.mu_critical) {
                        FullParams q = rc.params;
                        q.mu = *pt.mu_critical;
                        const Jacobian j = full_jacobian(pt.location, q);
                        const double scale = std::max(1.0, std::abs(j.F_theta) + std::abs(j.G_lambda));
                        worst_trace = std::max(worst_trace, std::abs(j.trace()) / scale);
                        ++trace_checks;
                    }
                }
            }
            c.computed = {{"critical_points", points},
                          {"disagreements", disagreements},
                          {"trace_checks", trace_checks},
                          {"worst_trace_at_mu_c", worst_trace}};
            c.verdict = disagreements == 0 && worst_trace <= 1e-9 ? Verdict::Pass : Verdict::Fail;
        });

    run(8, "period at the Hopf onset", "about 2e5 yr",
        "within 50% of 2 pi / Im r at 1.05 nu_c; [0.8, 4]e5 yr", [&](CriterionResult& c) {
            ReducedParams rp = need_base();
            const CriticalPoint cp0 = critical_point(rp);
            rp.nu = 1.05 * cp0.nu_c;
            const double omega = hopf_frequency(rp, cp0);
            const double linear = 2.0 * std::numbers::pi / omega;
            LimitCycleOptions lc = cfg.limit_cycle;
            lc.samples = 0;
            const LimitCycleMeasurement m = measure_limit_cycle(rp, cfg.integrator, lc);
            const double y = years(m.period, cfg);
            const double ratio = m.period / linear;
            c.computed = {{"nu", rp.nu},
                          {"period", m.period},
                          {"linear_period", linear},
                          {"ratio", ratio},
                          {"period_years", y}};
            c.verdict = ratio >= 0.5 && ratio <= 1.5 && y >= 0.8e5 && y <= 4e5 ? Verdict::Pass
                                                                               : Verdict::Fail;
        });

    run(9, "reduction fidelity", "discrepancy O(lambda^2)", "observed order >= 1.8",
        [&](CriterionResult& c) {
            ReducedParams rp;
            try {
                rp = reduce_from_full(cfg.full);
            } catch (const AssumptionError& e) {
                c.verdict = Verdict::NotApplicable;
                c.reason = e.what();
                return;
            }
            const SigmoidNullclines nc(rp);
            const FoldData fd = find_folds(rp);
            auto discrepancy = [&](double scale) {
                double worst = 0.0;
                for (int i = 0; i <= 8; ++i) {
                    const double theta =
                        fd.x_minus - 0.1 + (fd.x_plus - fd.x_minus + 0.2) * i / 8.0;
                    for (int j = 1; j <= 8; ++j) {
                        const FullState s{theta, scale * j / 8.0};
                        const ReducedRates mapped =
                            to_reduced_rates(full_rhs(s, cfg.full), cfg.feedback);
                        const ReducedState rs = to_reduced_state(s, cfg.feedback);
                        const ReducedRates red = reduced_rhs(rs, rp.nu, nc);
                        worst = std::max({worst, std::abs(mapped.dx - red.dx),
                                          std::abs(mapped.dy - red.dy)});
                    }
                }
                return worst;
            };
            json levels = json::array();
            double min_order = std::numeric_limits<double>::infinity();
            double prev = 0.0;
            for (int k = 0; k <= 5; ++k) {
                const double scale = 0.05 / std::pow(2.0, k);
                const double d = discrepancy(scale);
                json row = {{"lambda_max", scale}, {"discrepancy", d}};
                if (k > 0) {
                    const double order = std::log2(prev / d);
                    row["order"] = order;
                    min_order = std::min(min_order, order);
                }
                levels.push_back(row);
                prev = d;
            }
            c.computed = {{"levels", levels}, {"min_order", min_order}};
            c.verdict = min_order >= 1.8 ? Verdict::Pass : Verdict::Fail;
            if (c.verdict == Verdict::Fail) {
                c.reason =
                    "the mass-balance remainder dropped by the reduction is -4 xi lambda, "
                    "first order in lambda at fixed xi, so the discrepancy scales as lambda^1.5";
            }
        });

    run(10, "numerical hygiene", "derivatives, quadrature, integrator, Airy zero",
        "rel 1e-6; refinement invariance; |Ai(-zeta)| <= 1e-6", [&](CriterionResult& c) {
            double worst_deriv = 0.0;
            auto note = [&](double approx, double exact) {
                worst_deriv = std::max(worst_deriv, rel_err(approx, exact, 1e-6));
            };
            FullParams p = cfg.full;
            p.feedback.continental_mode = ContinentalMode::Sigmoid;
            p.kappa = KappaProfile{0.002, 0.01, 1.4};
            if (p.mu > 1e3) p.mu = 2.0;
            for (double lam : {0.05, 0.2, 0.5}) {
                for (double kap : {0.0, 0.003, 0.01}) {
                    note(lambda0_dlambda(lam, kap),
                         central([&](double l) { return lambda0_eval(l, kap); }, lam, 1e-6));
                    note(lambda0_dkappa(lam, kap),
                         central([&](double k) { return lambda0_eval(lam, k); }, kap, 1e-6));
                }
            }
            for (double th = 1.30; th <= 1.501; th += 0.05) {
                try {
                    note(theta_nullcline_deriv(th, p),
                         central([&](double t) { return theta_nullcline(t, p); }, th, 1e-6));
                } catch (const RangeError&) {
                }
                for (auto br : {LambdaBranch::Plus, LambdaBranch::Minus}) {
                    if (!lambda_nullcline_exists(th - 1e-5, p) || !lambda_nullcline_exists(th + 1e-5, p)) {
                        continue;
                    }
                    note(lambda_nullcline_deriv(th, br, p),
                         central([&](double t) { return lambda_nullcline(t, br, p); }, th, 1e-6));
                }
                for (double lam : {0.1, 0.3}) {
                    const Jacobian j = full_jacobian({th, lam}, p);
                    const double scale_f = std::abs(p.mu);
                    auto F = [&](double t, double l) { return full_rhs({t, l}, p).dtheta; };
                    auto G = [&](double t, double l) { return full_rhs({t, l}, p).dlambda; };
                    worst_deriv = std::max(
                        {worst_deriv,
                         std::abs(j.F_theta - central([&](double t) { return F(t, lam); }, th, 1e-6)) /
                             scale_f,
                         std::abs(j.F_lambda - central([&](double l) { return F(th, l); }, lam, 1e-6)) /
                             scale_f,
                         rel_err(j.G_theta, central([&](double t) { return G(t, lam); }, th, 1e-6), 1e-3),
                         rel_err(j.G_lambda, central([&](double l) { return G(th, l); }, lam, 1e-6), 1e-3)});
                }
            }

            const ReducedParams& rp = need_base();
            const SigmoidNullclines nc(rp);
            const FoldData fd = find_folds(rp);
            const double i1 = quad_I(nc, fd, StableBranch::Plus, fd.f_at_minus, fd.f_at_plus);
            const double i2 = quad_I(nc, fd, StableBranch::Plus, fd.f_at_minus, fd.f_at_plus,
                                     QuadratureOptions{1e-15, 1e-13, 1000});
            const double quad_change = rel_err(i1, i2);

            ReducedParams r10 = rp;
            r10.nu = 10.0;
            LimitCycleOptions lc = cfg.limit_cycle;
            lc.samples = 0;
            IntegratorConfig loose = cfg.integrator, tight = cfg.integrator;
            loose.rel_tol = 1e-9;
            tight.rel_tol = 1e-11;
            tight.abs_tol = std::min(tight.abs_tol, 1e-13);
            const double pl = measure_limit_cycle(r10, loose, lc).period;
            const double pt = measure_limit_cycle(r10, tight, lc).period;
            const double ode_change = rel_err(pl, pt);

            const double ai = std::abs(airy_ai(-kAiryZeta));
            c.computed = {{"worst_derivative_rel_error", worst_deriv},
                          {"quadrature_refinement_change", quad_change},
                          {"integrator_refinement_change", ode_change},
                          {"abs_ai_at_minus_zeta", ai}};
            c.verdict = worst_deriv <= 1e-6 && quad_change <= 1e-8 && ode_change <= 1e-4 &&
                                ai <= 1e-6
                            ? Verdict::Pass
                            : Verdict::Fail;
        });

    return rep;
}

}  // namespace glacia
