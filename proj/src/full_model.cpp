#include "glacia/full_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "glacia/errors.hpp"
#include "glacia/roots.hpp"

namespace glacia {

FullParams FullParams::from_constants(const ModelConstants& mc, const FeedbackParams& fb) {
    const DerivedScales ds = derive_scales(mc);
    fb.validate();
    return FullParams{mc, fb, ds.beta, ds.mu, ds.kappa};
}

std::string to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::StableNode: return "stable node";
        case StabilityClass::StableFocus: return "stable focus";
        case StabilityClass::UnstableNode: return "unstable node";
        case StabilityClass::UnstableFocus: return "unstable focus";
        case StabilityClass::Saddle: return "saddle";
        case StabilityClass::Degenerate: return "degenerate";
    }
    return "unknown";
}

std::string to_string(LambdaBranch b) { return b == LambdaBranch::Plus ? "k_plus" : "k_minus"; }

bool is_stable(StabilityClass c) {
    return c == StabilityClass::StableNode || c == StabilityClass::StableFocus;
}

FullRates full_rhs(const FullState& st, const FullParams& p) {
    if (!(st.lambda > 0.0)) {
        throw DomainError("full_rhs: lambda must be positive (got " + std::to_string(st.lambda) +
                          ")");
    }
    const double g = p.gamma();
    const double F = p.mu * (1.0 - p.beta - g * alpha_c(st.lambda, p.feedback) -
                             (1.0 - g) * alpha_o(st.theta, p.feedback) - st.theta);
    const double xi = xi_eval(st.theta, p.feedback);
    const double l0 = lambda0_eval(st.lambda, p.kappa(st.theta));
    const double G = std::sqrt(st.lambda) * ((1.0 + xi) * l0 - 1.0);
    return {F, G};
}

Jacobian full_jacobian(const FullState& st, const FullParams& p) {
    if (!(st.lambda > 0.0)) throw DomainError("full_jacobian: lambda must be positive");
    const double g = p.gamma();
    const double kap = p.kappa(st.theta);
    const double xi = xi_eval(st.theta, p.feedback);
    const double l0 = lambda0_eval(st.lambda, kap);
    const double sl = std::sqrt(st.lambda);

    Jacobian J;
    J.F_theta = -p.mu * ((1.0 - g) * alpha_o_deriv(st.theta, p.feedback) + 1.0);
    J.F_lambda = -p.mu * g * alpha_c_deriv(st.lambda, p.feedback);
    const double dl0_dtheta = p.kappa.deriv() * lambda0_dkappa(st.lambda, kap);
    J.G_theta = sl * (xi_deriv(st.theta, p.feedback) * l0 + (1.0 + xi) * dl0_dtheta);
    J.G_lambda = ((1.0 + xi) * l0 - 1.0) / (2.0 * sl) +
                 sl * (1.0 + xi) * lambda0_dlambda(st.lambda, kap);
    return J;
}

ValidityReport check_validity(const FullState& st, const FullParams& p) {
    ValidityReport r;
    const double kap = p.kappa(st.theta);
    try {
        r.not_stagnant = lambda0_eval(st.lambda, kap) >= 0.0;
    } catch (const DomainError&) {
        r.not_stagnant = false;
    }
    r.within_max_size = st.lambda <= 1.0;
    r.snowline_consistent = kap >= 0.0 || 2.0 * st.lambda + kap >= 0.0;
    return r;
}

double required_continental_albedo(double theta, const FullParams& p) {
    const double g = p.gamma();
    return -((1.0 - g) * alpha_o(theta, p.feedback) + theta + p.beta - 1.0) / g;
}

double theta_nullcline(double theta, const FullParams& p) {
    return alpha_c_inverse(required_continental_albedo(theta, p), p.feedback);
}

double theta_nullcline_deriv(double theta, const FullParams& p) {
    const double h = theta_nullcline(theta, p);
    const double g = p.gamma();
    return -((1.0 - g) * alpha_o_deriv(theta, p.feedback) + 1.0) /
           (g * alpha_c_deriv(h, p.feedback));
}

bool lambda_nullcline_exists(double theta, const FullParams& p) {
    const double xi = xi_eval(theta, p.feedback);
    return p.kappa(theta) <= 0.25 * xi / (2.0 + xi);
}

double lambda_nullcline(double theta, LambdaBranch branch, const FullParams& p) {
    const double xi = xi_eval(theta, p.feedback);
    const double kap = p.kappa(theta);
    const double m = 1.0 + 2.0 / xi;
    const double disc = 1.0 - 4.0 * m * kap;
    if (disc < 0.0) {
        throw RangeError("lambda_nullcline: no ice sheet can exist at theta = " +
                         std::to_string(theta) + " (kappa > xi / (4 (2 + xi)))");
    }
    const double pre = 0.5 * (1.0 + xi) * xi / ((2.0 + xi) * (2.0 + xi));
    const double root = std::sqrt(disc);
    return pre * (1.0 - 2.0 * m * kap + (branch == LambdaBranch::Plus ? root : -root));
}

double lambda_nullcline_deriv(double theta, LambdaBranch branch, const FullParams& p) {
    const double k = lambda_nullcline(theta, branch, p);
    if (!(k > 0.0)) throw DomainError("lambda_nullcline_deriv: branch at lambda <= 0");
    const double xi = xi_eval(theta, p.feedback);
    const double kap = p.kappa(theta);
    const double l0 = lambda0_eval(k, kap);
    const double dl0_dtheta = p.kappa.deriv() * lambda0_dkappa(k, kap);
    return -(xi_deriv(theta, p.feedback) * l0 + (1.0 + xi) * dl0_dtheta) /
           ((1.0 + xi) * lambda0_dlambda(k, kap));
}

namespace {

std::optional<double> nullcline_gap(double theta, LambdaBranch branch, const FullParams& p) {
    try {
        const double k = lambda_nullcline(theta, branch, p);
        if (!(k > 0.0)) return std::nullopt;
        return theta_nullcline(theta, p) - k;
    } catch (const Error&) {
        return std::nullopt;
    }
}

StabilityClass classify(const Jacobian& J) {
    const double tr = J.trace();
    const double det = J.det();
    const double det_scale = std::abs(J.F_theta * J.G_lambda) + std::abs(J.F_lambda * J.G_theta);
    const double tr_scale = std::abs(J.F_theta) + std::abs(J.G_lambda);
    if (std::abs(det) <= 1e-12 * det_scale) return StabilityClass::Degenerate;
    if (det < 0.0) return StabilityClass::Saddle;
    if (std::abs(tr) <= 1e-12 * tr_scale) return StabilityClass::Degenerate;
    const bool real = tr * tr - 4.0 * det >= 0.0;
    if (tr < 0.0) return real ? StabilityClass::StableNode : StabilityClass::StableFocus;
    return real ? StabilityClass::UnstableNode : StabilityClass::UnstableFocus;
}

}  // namespace

CriticalPointReport classify_stability(const FullState& point, const FullParams& p,
                                       double residual_tol) {
    // F carries the factor mu; the residual is measured on the energy balance itself.
    const FullRates r = full_rhs(point, p);
    const double energy_residual = std::abs(r.dtheta) / p.mu;
    if (energy_residual > residual_tol || std::abs(r.dlambda) > residual_tol) {
        std::ostringstream msg;
        msg << "classify_stability: (" << point.theta << ", " << point.lambda
            << ") is not a critical point (|F|/mu = " << energy_residual
            << ", |G| = " << std::abs(r.dlambda) << ")";
        throw AssumptionError(msg.str());
    }

    CriticalPointReport rep;
    rep.location = point;
    const double kp = lambda_nullcline(point.theta, LambdaBranch::Plus, p);
    const double km = lambda_nullcline(point.theta, LambdaBranch::Minus, p);
    rep.branch = std::abs(point.lambda - kp) <= std::abs(point.lambda - km) ? LambdaBranch::Plus
                                                                            : LambdaBranch::Minus;
    rep.jacobian = full_jacobian(point, p);
    rep.trace = rep.jacobian.trace();
    rep.determinant = rep.jacobian.det();
    const std::complex<double> disc =
        std::sqrt(std::complex<double>(rep.trace * rep.trace - 4.0 * rep.determinant, 0.0));
    rep.eigenvalues = {0.5 * (rep.trace + disc), 0.5 * (rep.trace - disc)};
    rep.classification = classify(rep.jacobian);

    // Nullcline slopes from the Jacobian (implicit function theorem).
    rep.dh_dtheta = -rep.jacobian.F_theta / rep.jacobian.F_lambda;
    rep.dk_dtheta = -rep.jacobian.G_theta / rep.jacobian.G_lambda;

    const double g = p.gamma();
    const double restoring = (1.0 - g) * alpha_o_deriv(point.theta, p.feedback) + 1.0;
    if (rep.branch == LambdaBranch::Plus && restoring < 0.0) {
        rep.mu_critical = mu_critical(point, p);
        rep.hopf = rep.dh_dtheta < rep.dk_dtheta;
    }
    return rep;
}

double mu_critical(const FullState& point, const FullParams& p) {
    const double g = p.gamma();
    const double restoring = (1.0 - g) * alpha_o_deriv(point.theta, p.feedback) + 1.0;
    if (restoring == 0.0) {
        throw DomainError("mu_critical: (1 - gamma) alpha_o' + 1 vanishes at the point");
    }
    // tr J(mu) = -mu * restoring + G_lambda, and G_lambda does not depend on mu.
    FullParams unit = p;
    unit.mu = 1.0;
    return full_jacobian(point, unit).G_lambda / restoring;
}

CriticalPointSearch find_critical_points(const FullParams& p, double theta_lo, double theta_hi,
                                         const CriticalPointOptions& opts) {
    CriticalPointSearch out;
    const double cell = (theta_hi - theta_lo) / opts.grid_cells;
    for (const LambdaBranch branch : {LambdaBranch::Plus, LambdaBranch::Minus}) {
        const auto gap = [&](double th) { return nullcline_gap(th, branch, p); };
        const auto brackets = sign_scan(gap, theta_lo, theta_hi, opts.grid_cells);

        const auto defined_gap = [&](double t) {
            const auto v = gap(t);
            if (!v) throw RangeError("nullcline undefined inside a bracket");
            return *v;
        };
        std::vector<double> roots;
        for (const Bracket& b : brackets) {
            double th = b.lo;
            if (b.lo != b.hi) {
                try {
                    th = find_root(defined_gap, b.lo, b.hi, RootOptions{.x_tol = opts.theta_tol});
                } catch (const Error& e) {
                    out.warnings.push_back(std::string("bracket skipped: ") + e.what());
                    continue;
                }
            }
            if (!roots.empty() && std::abs(th - roots.back()) < 0.5 * opts.theta_tol) continue;
            roots.push_back(th);
        }

        // Touching without crossing: small |gap| at a local minimum with no sign change.
        double prev2 = NAN;
        double prev1 = NAN;
        for (int i = 0; i <= opts.grid_cells; ++i) {
            const double th = theta_lo + cell * i;
            const auto v = gap(th);
            const double a = v ? std::abs(*v) : NAN;
            if (std::isfinite(prev2) && std::isfinite(prev1) && std::isfinite(a) && prev1 < prev2 &&
                prev1 < a) {
                const double th_mid = th - cell;
                const double k = lambda_nullcline(th_mid, branch, p);
                const bool near_root =
                    std::any_of(roots.begin(), roots.end(),
                                [&](double r) { return std::abs(r - th_mid) < 2.0 * cell; });
                if (!near_root && prev1 < 1e-3 * std::max(k, 1e-12)) {
                    std::ostringstream msg;
                    msg << "nullclines h and " << to_string(branch) << " nearly touch at theta ~ "
                        << th_mid << " (gap " << prev1 << "); a tangency may hide 0 or 2 roots";
                    out.warnings.push_back(msg.str());
                }
            }
            prev2 = prev1;
            prev1 = a;
        }
        for (std::size_t i = 1; i < roots.size(); ++i) {
            if (roots[i] - roots[i - 1] < 2.0 * cell) {
                std::ostringstream msg;
                msg << "critical points at theta = " << roots[i - 1] << " and " << roots[i]
                    << " on " << to_string(branch) << " are within two grid cells (near tangency)";
                out.warnings.push_back(msg.str());
            }
        }

        for (const double th : roots) {
            const FullState pt{th, lambda_nullcline(th, branch, p)};
            try {
                out.points.push_back(classify_stability(pt, p, opts.residual_tol));
            } catch (const Error& e) {
                out.warnings.push_back(std::string("skipped root: ") + e.what());
            }
        }
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const auto& a, const auto& b) { return a.location.theta < b.location.theta; });
    return out;
}

}  // namespace glacia
