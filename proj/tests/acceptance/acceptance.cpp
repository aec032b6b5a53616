// Acceptance checks. Each criterion is recomputed here with reference
// calculations that avoid the library's own solvers where that is practical,
// and compared with the library and with the target window.
//
// Usage: glacia_acceptance [--config FILE] [--strict] [--only N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "glacia/asymptotics.hpp"
#include "glacia/config.hpp"
#include "glacia/dynamics.hpp"
#include "glacia/errors.hpp"
#include "glacia/experiments.hpp"
#include "oracles.hpp"

using namespace glacia;

namespace {

constexpr std::uint64_t kSeed = 20240607;

// Criteria whose failure is understood and recorded in the README.
const std::set<int> kKnownDeviations = {9};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Folds and crossing of the reduced nullclines by plain bisection.
struct Geometry {
    double x_minus, x_plus, x_c, y_c;
};

Geometry bisect_geometry(const Nullclines& nc, double centre, double reach) {
    Geometry g{};
    g.x_minus = oracle::bisect([&](double x) { return nc.df(x); }, centre - reach, centre);
    g.x_plus = oracle::bisect([&](double x) { return nc.df(x); }, centre, centre + reach);
    g.x_c = oracle::bisect([&](double x) { return nc.f(x) - nc.g(x); }, g.x_minus, g.x_plus);
    g.y_c = nc.f(g.x_c);
    return g;
}

// Jacobian of the reduced field at (x, y) by central differences.
std::array<double, 4> reduced_jacobian_fd(const ReducedParams& rp, double x, double y) {
    const double h = 1e-7;
    const auto px = reduced_rhs({x + h, y}, rp), mx = reduced_rhs({x - h, y}, rp);
    const auto py = reduced_rhs({x, y + h}, rp), my = reduced_rhs({x, y - h}, rp);
    return {(px.dx - mx.dx) / (2 * h), (py.dx - my.dx) / (2 * h), (px.dy - mx.dy) / (2 * h),
            (py.dy - my.dy) / (2 * h)};
}

// Period from a fixed-step RK4 run: mean of the last upward crossings of x = x_c.
double rk4_period(const ReducedParams& rp, double x_c, oracle::V2 y0, double dt, int crossings) {
    auto field = [&](double, const oracle::V2& s) {
        const auto r = reduced_rhs({s[0], std::max(s[1], 0.0)}, rp);
        return oracle::V2{r.dx, r.dy};
    };
    std::vector<double> times;
    double t = 0.0;
    oracle::V2 s = y0;
    while (static_cast<int>(times.size()) < crossings && t < 1e4) {
        const oracle::V2 next = oracle::rk4(field, s, t, t + dt, 1);
        if (s[0] < x_c && next[0] >= x_c) times.push_back(t + dt * (x_c - s[0]) / (next[0] - s[0]));
        s = next;
        t += dt;
    }
    const int n = static_cast<int>(times.size());
    return (times[n - 1] - times[n - 4]) / 3.0;
}

double years(double t, const Config& cfg) { return reduced_time_to_years(t, cfg.xi_sum(), cfg.scales); }

// Leading period from the x-space form of the slow-branch integrals.
double leading_period_simpson(const Nullclines& nc, const FoldData& fd) {
    auto integrand = [&](double x) { return nc.df(x) / (std::sqrt(nc.f(x)) * (nc.g(x) - nc.f(x))); };
    return oracle::simpson(integrand, fd.x_tilde_minus, fd.x_plus, 200000) +
           oracle::simpson(integrand, fd.x_tilde_plus, fd.x_minus, 200000);
}

// Closed-form frozen-g integral checked by Simpson on the log-free integrand.
double phi_simpson(double u, double v, double k) {
    return oracle::simpson([k](double w) { return 1.0 / (std::sqrt(w) * (k - w)); }, v, u, 200000);
}

Outcome criterion1(const Config& cfg) {
    const ReducedParams rp = cfg.reduced();
    const SigmoidNullclines nc(rp);
    const Geometry g = bisect_geometry(nc, rp.x_alpha, 0.5);
    // Trace of J vanishes where nu f'(x_c) = sqrt(y_c); f' from differences.
    ReducedParams unit = rp;
    unit.nu = 1.0;
    const auto J = reduced_jacobian_fd(unit, g.x_c, g.y_c);
    const double nu_c = -J[3] / J[0];
    const double lib = critical_point(rp).nu_c;
    const bool pass = nu_c >= 0.05 && nu_c <= 0.2 && std::abs(lib - nu_c) <= 1e-6 * nu_c;
    return {pass, fmt("nu_c = %.6f (library %.6f), window [0.05, 0.2]", nu_c, lib)};
}

Outcome criterion2(const Config& cfg) {
    const ReducedParams rp = cfg.reduced();
    const SigmoidNullclines nc(rp);
    const FoldData fd = find_folds(rp);
    const double fm = fd.f_at_minus, fp = fd.f_at_plus;
    const double tm = phi_simpson(fm, fp, 1.0 - rp.d) + phi_simpson(fp, fm, 1.0 + rp.d);
    const double tp = phi_simpson(fm, fp, nc.g(fd.x_minus)) + phi_simpson(fp, fm, nc.g(fd.x_plus));
    const PeriodBounds pb = period_bounds(rp);
    const double ym = years(tm, cfg), yp = years(tp, cfg);
    const bool agree = std::abs(pb.T_minus - tm) <= 1e-8 * tm && std::abs(pb.T_plus - tp) <= 1e-8 * tp;
    const bool pass = agree && ym >= 81e3 && ym <= 110e3 && yp >= 106e3 && yp <= 144e3;
    return {pass, fmt("T- = %.1f kyr in [81, 110], T+ = %.1f kyr in [106, 144]; library agrees: %s",
                      ym / 1e3, yp / 1e3, agree ? "yes" : "no")};
}

Outcome criterion3(const Config& cfg) {
    ReducedParams rp = cfg.reduced();
    rp.nu = 10.0;
    const SigmoidNullclines nc(rp);
    const Geometry g = bisect_geometry(nc, rp.x_alpha, 0.5);
    const double ref = rk4_period(rp, g.x_c, {g.x_c + 0.1 * (g.x_plus - g.x_minus), g.y_c}, 2e-4, 12);
    LimitCycleOptions lc = cfg.limit_cycle;
    lc.samples = 0;
    const double lib = measure_limit_cycle(rp, cfg.integrator, lc).period;
    const double y = years(lib, cfg);
    const bool pass = std::abs(lib - ref) <= 1e-5 * ref && y >= 103e3 && y <= 139e3;
    return {pass, fmt("period = %.2f kyr in [103, 139] (t = %.6f, fixed-step RK4 %.6f)", y / 1e3, lib, ref)};
}

Outcome criterion4(const Config& cfg) {
    const ReducedParams rp = cfg.reduced();
    const SigmoidNullclines nc(rp);
    const FoldData fd = find_folds(rp);
    const PeriodExpansion pe = period_asymptotic(rp);
    const double lead = leading_period_simpson(nc, fd);
    SweepSpec spec;
    spec.nu_min = 1e2;
    spec.nu_max = 1e6;
    spec.points = 5;
    const SweepResult sw = run_sweep(spec, rp, cfg.integrator, cfg.limit_cycle);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    double e100 = 1.0, e1e4 = 1.0;
    for (const auto& r : sw.rows) {
        if (!r.period_measured) return {false, "no measurement at nu = " + format_double(r.nu) + ": " + r.error};
        const double lx = std::log(r.nu), ly = std::log(*r.period_measured - lead);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, ++n;
        const double rel = std::abs(*r.period_measured - pe.total(r.nu)) / *r.period_measured;
        if (std::abs(r.nu / 1e2 - 1) < 1e-9) e100 = rel;
        if (std::abs(r.nu / 1e4 - 1) < 1e-9) e1e4 = rel;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const bool lead_ok = std::abs(lead - pe.leading) <= 1e-9 * lead;
    const bool pass = lead_ok && std::abs(slope + 2.0 / 3.0) <= 0.05 && e100 <= 0.05 && e1e4 <= 0.01;
    return {pass, fmt("slope = %.4f (target -0.6667 +- 0.05), rel. error %.2e at nu = 1e2 (<= 5e-2), "
                      "%.2e at nu = 1e4 (<= 1e-2); leading by Simpson agrees: %s",
                      slope, e100, e1e4, lead_ok ? "yes" : "no")};
}

Outcome criterion5(const Config& cfg) {
    const ReducedParams base = cfg.reduced();
    std::mt19937_64 rng(kSeed + 5);
    int violations = 0;
    auto check = [&](const ReducedParams& rp) {
        const PeriodBounds pb = period_bounds(rp);
        const double lead = period_asymptotic(rp).leading;
        if (!(pb.T_minus <= lead && lead <= pb.T_plus)) ++violations;
    };
    check(base);
    for (int i = 0; i < 50; ++i) check(random_admissible_reduced(rng, base));
    return {violations == 0, fmt("%d violations of T- <= leading <= T+ over 51 sets", violations)};
}

Outcome criterion6(const Config& cfg) {
    const ReducedParams base = cfg.reduced();
    auto error_of = [](const ReducedParams& rp, CriticalPointEstimate& est) {
        const SigmoidNullclines nc(rp);
        const FoldData fd = find_folds(rp);
        const double x_c = oracle::bisect([&](double x) { return nc.f(x) - nc.g(x); }, fd.x_minus, fd.x_plus);
        est = critical_point_approx(rp);
        return std::abs(est.estimate - x_c);
    };
    CriticalPointEstimate est;
    const double err0 = error_of(base, est);
    std::mt19937_64 rng(kSeed + 6);
    int violations = 0;
    for (int i = 0; i < 100; ++i) {
        const ReducedParams rp = random_admissible_reduced(rng, base);
        if (!(error_of(rp, est) <= est.bound)) ++violations;
    }
    return {err0 <= 1e-2 && violations == 0,
            fmt("calibrated error %.2e (<= 1e-2); %d bound violations over 100 sets", err0, violations)};
}

// Simulates the full model from a perturbed critical point with fixed-step RK4.
bool rk4_diverges(const FullParams& p, const CriticalPointReport& pt, const oracle::Eig& e) {
    const double slow = std::min(std::abs(e.re1), std::abs(e.re2));
    const double fast = std::max(std::hypot(e.re1, e.im), std::hypot(e.re2, e.im));
    const double horizon = 12.0 / slow;
    const long steps = std::min<long>(4'000'000, static_cast<long>(horizon * fast / 0.05) + 1);
    const double d0 = 1e-6 * std::max(1e-3, pt.location.lambda);
    oracle::V2 s{pt.location.theta + 0.8 * d0, pt.location.lambda + 0.6 * d0};
    auto field = [&](double, const oracle::V2& y) {
        const FullRates r = full_rhs({y[0], y[1]}, p);
        return oracle::V2{r.dtheta, r.dlambda};
    };
    try {
        s = oracle::rk4(field, s, 0.0, horizon, steps);
    } catch (const DomainError&) {
        return true;
    }
    return std::hypot(s[0] - pt.location.theta, s[1] - pt.location.lambda) > d0;
}

Outcome criterion7(const Config& cfg) {
    std::mt19937_64 rng(kSeed + 7);
    int points = 0, disagreements = 0, trace_checks = 0, stable = 0;
    double worst_trace = 0.0;
    for (int i = 0; i < 20; ++i) {
        const RandomFullConfig rc = random_full_with_critical_points(rng, cfg.full);
        for (const auto& pt : rc.points) {
            ++points;
            const FullState c = pt.location;
            const double h = 1e-7;
            auto at = [&](double dt, double dl) { return full_rhs({c.theta + dt, c.lambda + dl}, rc.params); };
            const double hl = h * c.lambda;
            const auto e = oracle::eig2((at(h, 0).dtheta - at(-h, 0).dtheta) / (2 * h),
                                        (at(0, hl).dtheta - at(0, -hl).dtheta) / (2 * hl),
                                        (at(h, 0).dlambda - at(-h, 0).dlambda) / (2 * h),
                                        (at(0, hl).dlambda - at(0, -hl).dlambda) / (2 * hl));
            const bool stable_eig = std::max(e.re1, e.re2) < 0.0;
            stable += stable_eig;
            if (stable_eig != is_stable(pt.classification)) ++disagreements;
            if (rk4_diverges(rc.params, pt, e) == stable_eig) ++disagreements;
            if (pt.mu_critical) {
                FullParams q = rc.params;
                q.mu = *pt.mu_critical;
                worst_trace = std::max(worst_trace, std::abs(full_jacobian(c, q).trace()));
                ++trace_checks;
            }
        }
    }
    const bool pass = disagreements == 0 && worst_trace <= 1e-9 && stable > 0 && stable < points;
    return {pass, fmt("%d points (%d stable), %d disagreements; |tr J(mu_c)| <= %.1e over %d points",
                      points, stable, disagreements, worst_trace, trace_checks)};
}

Outcome criterion8(const Config& cfg) {
    ReducedParams rp = cfg.reduced();
    const CriticalPoint cp = critical_point(rp);
    rp.nu = 1.05 * cp.nu_c;
    const auto J = reduced_jacobian_fd(rp, cp.x_c, cp.y_c);
    const auto e = oracle::eig2(J[0], J[1], J[2], J[3]);
    if (e.im == 0.0) return {false, "eigenvalues at 1.05 nu_c are real"};
    const double linear = 2.0 * std::numbers::pi / e.im;
    LimitCycleOptions lc = cfg.limit_cycle;
    lc.samples = 0;
    const double period = measure_limit_cycle(rp, cfg.integrator, lc).period;
    const double ratio = period / linear, y = years(period, cfg);
    const bool pass = ratio >= 0.5 && ratio <= 1.5 && y >= 0.8e5 && y <= 4e5;
    return {pass, fmt("period / (2 pi / Im r) = %.3f in [0.5, 1.5]; period = %.1f kyr in [80, 400]",
                      ratio, y / 1e3)};
}

Outcome criterion9(const Config& cfg) {
    const ReducedParams rp = reduce_from_full(cfg.full);
    const double S = cfg.xi_sum();
    const double nu = cfg.full.mu * rp.b / std::sqrt(2.0 * S);
    // Mapping written out: x = theta, y = 8 lambda / S, t = sqrt(2 S) tau.
    auto discrepancy = [&](double lmax) {
        double worst = 0.0;
        for (int i = 0; i <= 8; ++i) {
            const double th = 1.25 + 0.3 * i / 8.0;
            for (int j = 1; j <= 8; ++j) {
                const double la = lmax * j / 8.0;
                const FullRates r = full_rhs({th, la}, cfg.full);
                const double dx = r.dtheta / std::sqrt(2.0 * S);
                const double dy = 8.0 / S * r.dlambda / std::sqrt(2.0 * S);
                const double y = 8.0 * la / S;
                const SigmoidNullclines nc(rp);
                const double rx = nu * (nc.f(th) - y), ry = std::sqrt(y) * (nc.g(th) - y);
                worst = std::max({worst, std::abs(dx - rx), std::abs(dy - ry)});
            }
        }
        return worst;
    };
    std::string orders;
    double prev = discrepancy(0.05), min_order = 1e9, last = 0.0;
    for (int k = 1; k <= 7; ++k) {
        const double d = discrepancy(0.05 / std::pow(2.0, k));
        last = std::log2(prev / d);
        min_order = std::min(min_order, last);
        orders += fmt("%s%.2f", k > 1 ? ", " : "", last);
        prev = d;
    }
    return {min_order >= 1.8,
            fmt("observed orders under lambda halving: %s (need >= 1.8; the dropped remainder is "
                "O(lambda^1.5))", orders.c_str())};
}

Outcome criterion10(const Config& cfg) {
    // Closed-form derivatives against central differences, relative to the
    // derivative's magnitude over the sampled range.
    double worst = 0.0;
    auto compare = [&](const std::function<double(double)>& f, const std::function<double(double)>& df,
                       double lo, double hi) {
        std::vector<double> exact, approx;
        for (int i = 0; i <= 200; ++i) {
            const double x = lo + (hi - lo) * (i + 0.31) / 201.0;
            const double h = 1e-6 * std::max(1.0, std::abs(x));
            exact.push_back(df(x));
            approx.push_back((f(x + h) - f(x - h)) / (2 * h));
        }
        double scale = 0.0;
        for (double v : approx) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < exact.size(); ++i) {
            worst = std::max(worst, std::abs(exact[i] - approx[i]) / std::max(std::abs(approx[i]), 1e-3 * scale));
        }
    };
    const FullParams sig = FullParams::from_constants(cfg.constants, [&] {
        FeedbackParams f = cfg.feedback;
        f.continental_mode = ContinentalMode::Sigmoid;
        f.delta_alpha = 0.15;
        return f;
    }());
    const FeedbackParams& fs = sig.feedback;
    compare([&](double l) { return alpha_c(l, fs); }, [&](double l) { return alpha_c_deriv(l, fs); }, 0.01, 0.3);
    compare([&](double t) { return alpha_o(t, fs); }, [&](double t) { return alpha_o_deriv(t, fs); }, 1.1, 1.7);
    compare([&](double t) { return xi_eval(t, fs); }, [&](double t) { return xi_deriv(t, fs); }, 1.2, 1.6);
    for (double k : {0.0, 0.05}) {
        compare([&](double l) { return oracle::lambda0(l, k); }, [&](double l) { return lambda0_dlambda(l, k); }, 0.01, 0.9);
        compare([&](double kk) { return oracle::lambda0(0.1, kk); }, [&](double kk) { return lambda0_dkappa(0.1, kk); },
                k, k + 0.02);
    }
    const FullParams& lin = cfg.full;
    compare([&](double t) { return theta_nullcline(t, lin); }, [&](double t) { return theta_nullcline_deriv(t, lin); },
            1.3, 1.5);
    FullParams sloped = lin;
    sloped.kappa = {0.005, 0.02, 1.4};
    for (auto br : {LambdaBranch::Plus, LambdaBranch::Minus}) {
        compare([&](double t) { return lambda_nullcline(t, br, sloped); },
                [&](double t) { return lambda_nullcline_deriv(t, br, sloped); }, 1.3, 1.5);
    }

    // Quadrature: a tighter tolerance must stay within the looser one.
    const ReducedParams rp = cfg.reduced();
    const SigmoidNullclines nc(rp);
    const FoldData fd = find_folds(rp);
    const double q_loose = quad_I(nc, fd, StableBranch::Minus, fd.f_at_plus, fd.f_at_minus, {1e-10, 1e-8, 500});
    const double q_tight = quad_I(nc, fd, StableBranch::Minus, fd.f_at_plus, fd.f_at_minus, {1e-15, 1e-13, 4000});
    const double q_change = std::abs(q_loose - q_tight) / q_tight;

    // Integrator: the measured period moves by no more than the looser tolerance allows.
    ReducedParams r10 = rp;
    r10.nu = 10.0;
    LimitCycleOptions lc = cfg.limit_cycle;
    lc.samples = 0;
    IntegratorConfig loose = cfg.integrator, tight = cfg.integrator;
    loose.rel_tol = 1e-7;
    loose.abs_tol = 1e-9;
    tight.rel_tol = 1e-11;
    tight.abs_tol = 1e-13;
    const double p_loose = measure_limit_cycle(r10, loose, lc).period;
    const double p_tight = measure_limit_cycle(r10, tight, lc).period;
    const double i_change = std::abs(p_loose - p_tight) / p_tight;

    const double ai = std::abs(oracle::airy_ai_negative(-kAiryZeta));
    const bool pass = worst <= 1e-6 && q_change <= 1e-8 && i_change <= 1e-6 && ai <= 1e-6;
    return {pass, fmt("worst derivative rel. error %.1e (<= 1e-6); quadrature refinement change %.1e; "
                      "integrator refinement change %.1e; |Ai(-zeta)| = %.1e (<= 1e-6)",
                      worst, q_change, i_change, ai)};
}

}  // namespace

int main(int argc, char** argv) {
    std::string path = std::string(GLACIA_CONFIG_DIR) + "/paper-reduced.json";
    bool strict = false;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--strict")) {
            strict = true;
        } else if (!std::strcmp(argv[i], "--config") && i + 1 < argc) {
            path = argv[++i];
        } else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--config FILE] [--strict] [--only N]\n", argv[0]);
            return 2;
        }
    }
    const Config cfg = load_config(path);
    const std::vector<std::pair<std::string, std::function<Outcome(const Config&)>>> criteria = {
        {"critical nu", criterion1},
        {"period bounds", criterion2},
        {"period at nu = 10", criterion3},
        {"power law of the period correction", criterion4},
        {"period sandwich", criterion5},
        {"critical point estimate", criterion6},
        {"stability classification", criterion7},
        {"period at the Hopf onset", criterion8},
        {"reduction fidelity", criterion9},
        {"numerical hygiene", criterion10},
    };
    int unexpected = 0, failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (only && id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second(cfg);
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool known = kKnownDeviations.count(id) > 0;
        if (!o.pass) {
            ++failed;
            if (!known) ++unexpected;
        }
        std::printf("%s criterion %2d (%s) [%.2f s]: %s%s\n", o.pass ? "PASS" : "FAIL", id,
                    criteria[k].first.c_str(), secs, o.detail.c_str(),
                    !o.pass && known ? " -- known deviation, see README" : "");
        std::fflush(stdout);
    }
    std::printf("%d failed (%d unexpected)\n", failed, unexpected);
    return (strict ? failed : unexpected) > 0 ? 1 : 0;
}
