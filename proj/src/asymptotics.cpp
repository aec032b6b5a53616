#include "glacia/asymptotics.hpp"

#include <cmath>
#include <sstream>

#include "glacia/errors.hpp"

namespace glacia {

namespace {

constexpr int kDenominatorSamples = 64;

void require_relaxation_geometry(const Nullclines& nc) {
    const AssumptionReport r = check_assumptions(nc, 1.0);
    if (!r.fold_minus_above || !r.fold_plus_below || !r.unique_critical) {
        std::string msg = "relaxation-oscillation geometry fails:";
        for (const auto& m : r.messages) msg += " " + m + ";";
        throw AssumptionError(msg);
    }
}

}  // namespace

double quad_I(const Nullclines& nc, const FoldData& folds, StableBranch branch, double u,
              double v, const QuadratureOptions& opts) {
    if (u == v) return 0.0;
    if (!(u > 0.0) || !(v > 0.0)) throw DomainError("quad_I requires positive ordinates");
    auto denom = [&](double w) { return nc.g(branch_inverse(nc, folds, branch, w)) - w; };

    const double lo = std::min(u, v);
    const double hi = std::max(u, v);
    int sign = 0;
    for (int i = 0; i <= kDenominatorSamples; ++i) {
        const double w = lo + (hi - lo) * i / kDenominatorSamples;
        const double dv = denom(w);
        if (std::abs(dv) < 1e-12 * std::max(1.0, std::abs(w)) ||
            (sign != 0 && (dv > 0.0 ? 1 : -1) != sign)) {
            std::ostringstream os;
            os << "singular integrand: g(f^-1(w)) - w vanishes near w = " << w;
            throw SingularIntegrandError(os.str());
        }
        sign = dv > 0.0 ? 1 : -1;
    }

    const auto r = integrate_gk15([&](double w) { return 1.0 / (std::sqrt(w) * denom(w)); }, u, v,
                                  opts);
    if (!r.converged) {
        std::ostringstream os;
        os << "quad_I did not converge: estimate " << r.value << ", error " << r.abs_error;
        throw ConvergenceError(os.str());
    }
    return r.value;
}

double quad_I(StableBranch branch, double u, double v, const ReducedParams& rp) {
    const SigmoidNullclines nc(rp);
    return quad_I(nc, find_folds(rp), branch, u, v);
}

PeriodExpansion period_asymptotic(const Nullclines& nc) {
    require_relaxation_geometry(nc);
    const FoldData fd = find_folds(nc);
    const double fm = fd.f_at_minus;
    const double fp = fd.f_at_plus;
    PeriodExpansion pe;
    pe.time_plus_branch = quad_I(nc, fd, StableBranch::Plus, fm, fp);
    pe.time_minus_branch = quad_I(nc, fd, StableBranch::Minus, fp, fm);
    pe.leading = pe.time_plus_branch + pe.time_minus_branch;

    const double gm = nc.g(fd.x_minus);
    const double gp = nc.g(fd.x_plus);
    const double c_minus = std::cbrt(0.5 * nc.d2f(fd.x_minus) * std::sqrt(fm) * (fm - gm));
    const double c_plus = std::cbrt(0.5 * nc.d2f(fd.x_plus) * std::sqrt(fp) * (fp - gp));
    const double land_minus = 1.0 + (fm - gm) / (nc.g(fd.x_tilde_minus) - fm);
    const double land_plus = 1.0 + (gp - fp) / (fp - nc.g(fd.x_tilde_plus));
    pe.correction_coeff = kAiryZeta * (land_minus / c_minus + land_plus / c_plus);
    return pe;
}

PeriodExpansion period_asymptotic(const ReducedParams& rp) {
    find_folds(rp);
    return period_asymptotic(SigmoidNullclines(rp));
}

AmplitudeExpansion amplitude_asymptotic(const Nullclines& nc) {
    require_relaxation_geometry(nc);
    const FoldData fd = find_folds(nc);
    const double fm = fd.f_at_minus;
    const double fp = fd.f_at_plus;
    const double gm = nc.g(fd.x_minus);
    const double gp = nc.g(fd.x_plus);
    AmplitudeExpansion ae;
    ae.ax_leading = fd.x_tilde_minus - fd.x_tilde_plus;
    ae.ay_leading = fp - fm;
    const double top = std::cbrt(2.0 * fp * (fp - gp) * (fp - gp) / nc.d2f(fd.x_plus));
    const double bottom = std::cbrt(2.0 * fm * (fm - gm) * (fm - gm) / nc.d2f(fd.x_minus));
    ae.ax_correction =
        kAiryZeta * (top / nc.df(fd.x_tilde_plus) - bottom / nc.df(fd.x_tilde_minus));
    return ae;
}

AmplitudeExpansion amplitude_asymptotic(const ReducedParams& rp) {
    find_folds(rp);
    return amplitude_asymptotic(SigmoidNullclines(rp));
}

double phi(double u, double v, double k) {
    if (!(u > 0.0) || !(v > 0.0) || !(k > 0.0)) {
        throw DomainError("phi requires positive arguments");
    }
    if ((u - k) * (v - k) <= 0.0) {
        throw DomainError("phi: integration range touches the pole w = k");
    }
    const double su = std::sqrt(u);
    const double sv = std::sqrt(v);
    const double sk = std::sqrt(k);
    // |sqrt(a) - sqrt(k)| written as |a - k| / (sqrt(a) + sqrt(k)) to avoid cancellation.
    const double du = std::abs(u - k) / (su + sk);
    const double dv = std::abs(v - k) / (sv + sk);
    return ((std::log(dv) - std::log(du)) + (std::log(su + sk) - std::log(sv + sk))) / sk;
}

PeriodBounds period_bounds(const Nullclines& nc) {
    const FoldData fd = find_folds(nc);
    const auto [g_lo, g_hi] = nc.g_limits();
    const double fm = fd.f_at_minus;
    const double fp = fd.f_at_plus;
    PeriodBounds pb;
    pb.T_minus = phi(fm, fp, g_lo) + phi(fp, fm, g_hi);
    pb.T_plus = phi(fm, fp, nc.g(fd.x_minus)) + phi(fp, fm, nc.g(fd.x_plus));
    return pb;
}

PeriodBounds period_bounds(const ReducedParams& rp) {
    find_folds(rp);
    return period_bounds(SigmoidNullclines(rp));
}

double amplitude_bound(const ReducedParams& rp) {
    const FoldData fd = find_folds(rp);
    return 2.0 * rp.c + rp.b * (fd.f_at_plus - fd.f_at_minus);
}

}  // namespace glacia
