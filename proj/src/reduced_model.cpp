#include "glacia/reduced_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "glacia/errors.hpp"
#include "glacia/roots.hpp"

namespace glacia {

namespace {

double xi_sum(const FeedbackParams& fb) { return fb.xi_minus + fb.xi_plus; }

std::vector<double> refined_roots(const std::function<double(double)>& fn, double lo, double hi,
                                  int cells) {
    std::vector<double> roots;
    for (const auto& br : sign_scan([&](double x) -> std::optional<double> { return fn(x); }, lo,
                                    hi, cells)) {
        const double r = br.lo == br.hi ? br.lo
                                        : find_root(fn, br.lo, br.hi, RootOptions{.x_tol = 1e-15});
        if (roots.empty() || r - roots.back() > 1e-13) roots.push_back(r);
    }
    return roots;
}

}  // namespace

ReducedParams reduce_from_full(const FullParams& p) {
    const auto& fb = p.feedback;
    if (fb.continental_mode != ContinentalMode::Linear) {
        throw AssumptionError("reduction requires the linear continental albedo");
    }
    if (p.kappa.value != 0.0 || p.kappa.slope != 0.0) {
        throw AssumptionError("reduction is only defined for kappa = 0");
    }
    const double g = p.gamma();
    const double S = xi_sum(fb);
    ReducedParams rp;
    rp.a = 1.0 - p.beta - g * fb.alpha0 - 0.5 * (1.0 - g) * (fb.alpha_minus + fb.alpha_plus);
    rp.b = g * fb.alpha1 * S / 8.0;
    rp.c = 0.5 * (1.0 - g) * (fb.alpha_minus - fb.alpha_plus);
    rp.d = (fb.xi_plus - fb.xi_minus) / S;
    rp.nu = p.mu * rp.b / std::sqrt(2.0 * S);
    rp.x_alpha = fb.theta_alpha;
    rp.x_xi = fb.theta_xi;
    rp.delta_alpha = fb.delta_alpha;
    rp.delta_xi = fb.delta_xi;
    rp.sigmoid_family = fb.sigmoid_family;
    return rp;
}

ReducedState to_reduced_state(const FullState& s, const FeedbackParams& fb) {
    return {s.theta, 8.0 * s.lambda / xi_sum(fb)};
}

ReducedRates to_reduced_rates(const FullRates& r, const FeedbackParams& fb) {
    const double S = xi_sum(fb);
    const double dt_dtau = std::sqrt(2.0 * S);
    return {r.dtheta / dt_dtau, 8.0 * r.dlambda / (S * dt_dtau)};
}

double f_eval(double x, const ReducedParams& rp) { return SigmoidNullclines(rp).f(x); }
double g_eval(double x, const ReducedParams& rp) { return SigmoidNullclines(rp).g(x); }

ReducedRates reduced_rhs(const ReducedState& s, double nu, const Nullclines& nc) {
    if (!(s.y >= 0.0)) {
        std::ostringstream os;
        os << "reduced system undefined for y = " << s.y << " < 0";
        throw DomainError(os.str());
    }
    return {nu * (nc.f(s.x) - s.y), std::sqrt(s.y) * (nc.g(s.x) - s.y)};
}

ReducedRates reduced_rhs(const ReducedState& s, const ReducedParams& rp) {
    return reduced_rhs(s, rp.nu, SigmoidNullclines(rp));
}

double branch_inverse(const Nullclines& nc, const FoldData& folds, StableBranch branch, double w) {
    const bool minus = branch == StableBranch::Minus;
    const double edge = minus ? folds.x_minus : folds.x_plus;
    const double f_edge = minus ? folds.f_at_minus : folds.f_at_plus;
    if (minus ? w < f_edge : w > f_edge) {
        std::ostringstream os;
        os << "ordinate " << w << " outside the range of the " << (minus ? "left" : "right")
           << " branch (fold value " << f_edge << ")";
        throw RangeError(os.str());
    }
    if (w == f_edge) return edge;

    // f - w has the wrong sign at the fold; walk outward until it flips.
    auto h = [&](double x) { return nc.f(x) - w; };
    const double dir = minus ? -1.0 : 1.0;
    double step = std::max(1e-3, 0.1 * (folds.x_plus - folds.x_minus));
    double far = edge + dir * step;
    for (int i = 0; i < 200; ++i) {
        if (minus ? h(far) >= 0.0 : h(far) <= 0.0) break;
        step *= 2.0;
        far = edge + dir * step;
        if (!std::isfinite(far)) break;
    }
    if (minus ? !(h(far) >= 0.0) : !(h(far) <= 0.0)) {
        throw RangeError("branch_inverse: ordinate not attained on the branch");
    }
    return minus ? find_root(h, far, edge, RootOptions{.x_tol = 0.0})
                 : find_root(h, edge, far, RootOptions{.x_tol = 0.0});
}

double branch_inverse(double w, StableBranch branch, const ReducedParams& rp) {
    const SigmoidNullclines nc(rp);
    return branch_inverse(nc, find_folds(nc), branch, w);
}

FoldData find_folds(const Nullclines& nc) {
    FoldData fd;
    if (auto cf = nc.closed_form_folds()) {
        fd.x_minus = cf->first;
        fd.x_plus = cf->second;
    } else {
        Interval win = nc.search_window();
        std::vector<double> roots;
        for (int attempt = 0; attempt < 4; ++attempt) {
            roots = refined_roots([&](double x) { return nc.df(x); }, win.lo, win.hi, 1024);
            // Both folds well inside the window: done.
            const double w = win.hi - win.lo;
            if (roots.size() == 2 && roots.front() - win.lo > 0.05 * w &&
                win.hi - roots.back() > 0.05 * w) {
                break;
            }
            win = {win.lo - w / 2.0, win.hi + w / 2.0};
        }
        if (roots.size() != 2 || !(nc.d2f(roots[0]) > 0.0) || !(nc.d2f(roots[1]) < 0.0)) {
            std::ostringstream os;
            os << "f must have exactly one minimum followed by one maximum (found " << roots.size()
               << " critical points of f); the steepness condition delta_alpha < c max sigmoid' "
                  "fails";
            throw AssumptionError(os.str());
        }
        fd.x_minus = roots[0];
        fd.x_plus = roots[1];
    }
    if (!(fd.x_minus < fd.x_plus)) {
        throw AssumptionError("f must have a minimum to the left of its maximum");
    }
    fd.f_at_minus = nc.f(fd.x_minus);
    fd.f_at_plus = nc.f(fd.x_plus);
    fd.x_tilde_minus = branch_inverse(nc, fd, StableBranch::Plus, fd.f_at_minus);
    fd.x_tilde_plus = branch_inverse(nc, fd, StableBranch::Minus, fd.f_at_plus);
    return fd;
}

FoldData find_folds(const ReducedParams& rp) {
    const double limit = sigmoid_max_deriv(rp.sigmoid_family);
    if (!(rp.c > 0.0) || !(rp.delta_alpha / rp.c < limit)) {
        std::ostringstream os;
        os << "f has no fold: delta_alpha / c = " << rp.delta_alpha / rp.c
           << " must be below max sigmoid' = " << limit;
        throw AssumptionError(os.str());
    }
    return find_folds(SigmoidNullclines(rp));
}

CriticalPoint critical_point(const Nullclines& nc, const ScanOptions& opts) {
    const FoldData fd = find_folds(nc);
    const auto roots =
        refined_roots([&](double x) { return nc.f(x) - nc.g(x); }, fd.x_minus, fd.x_plus,
                      std::max(8, opts.cells));
    if (roots.size() != 1) {
        std::ostringstream os;
        os << "expected one critical point between the folds, found " << roots.size();
        throw AssumptionError(os.str());
    }
    CriticalPoint cp;
    cp.x_c = roots.front();
    cp.y_c = nc.f(cp.x_c);
    cp.nu_c = std::sqrt(cp.y_c) / nc.df(cp.x_c);
    return cp;
}

CriticalPoint critical_point(const ReducedParams& rp, const ScanOptions& opts) {
    find_folds(rp);
    return critical_point(SigmoidNullclines(rp), opts);
}

CriticalPointEstimate critical_point_approx(const Nullclines& nc) {
    const FoldData fd = find_folds(nc);
    const double xa = nc.f_inflection();
    const double xx = nc.g_inflection();
    const double fa = nc.df(xa);
    const double gx = nc.dg(xx);
    CriticalPointEstimate est;
    est.estimate = (nc.f(xa) - fa * xa - nc.g(xx) + gx * xx) / (gx - fa);
    est.slope_gap = gx - fa;

    double m = 0.0;
    constexpr int kSamples = 1000;
    for (int i = 0; i <= kSamples; ++i) {
        const double x = fd.x_minus + (fd.x_plus - fd.x_minus) * i / kSamples;
        m = std::max({m, std::abs(nc.d3f(x)), std::abs(nc.d3g(x))});
    }
    est.C = m / 3.0;
    const double w = fd.x_plus - fd.x_minus;
    est.bound = est.C * w * w * w;
    return est;
}

CriticalPointEstimate critical_point_approx(const ReducedParams& rp) {
    find_folds(rp);
    return critical_point_approx(SigmoidNullclines(rp));
}

AssumptionReport check_assumptions(const Nullclines& nc, double nu) {
    AssumptionReport r;
    r.nu = nu;
    r.folds = find_folds(nc);
    const auto& fd = r.folds;
    r.fold_minus_above = fd.f_at_minus > nc.g(fd.x_minus);
    r.fold_plus_below = fd.f_at_plus < nc.g(fd.x_plus);
    if (!r.fold_minus_above) r.messages.push_back("f(x-) <= g(x-)");
    if (!r.fold_plus_below) r.messages.push_back("f(x+) >= g(x+)");
    try {
        r.critical = critical_point(nc);
        r.unique_critical = true;
    } catch (const AssumptionError& e) {
        r.messages.emplace_back(e.what());
    }
    if (r.critical) {
        const double x = r.critical->x_c;
        r.unstable = nc.dg(x) > nc.df(x) && nc.df(x) > 0.0;
        if (!r.unstable) r.messages.push_back("g'(x_c) > f'(x_c) > 0 fails");
        r.limit_cycle = nu > r.critical->nu_c;
        if (!r.limit_cycle) {
            std::ostringstream os;
            os << "nu = " << nu << " does not exceed nu_c = " << r.critical->nu_c;
            r.messages.push_back(os.str());
        }
    }
    return r;
}

AssumptionReport check_assumptions(const ReducedParams& rp) {
    find_folds(rp);
    return check_assumptions(SigmoidNullclines(rp), rp.nu);
}

}  // namespace glacia
