#pragma once

#include <cmath>

#include "glacia/quadrature.hpp"
#include "glacia/reduced_model.hpp"

namespace glacia {

/// Minus the largest zero of the Airy function Ai.
constexpr double kAiryZeta = 2.338107410459767;

/// I(u, v) = integral from u to v of dw / (sqrt(w) (g(f^{-1}(w)) - w)) with f
/// inverted on the given stable branch. Throws SingularIntegrandError when
/// the denominator vanishes or changes sign on [u, v].
double quad_I(const Nullclines& nc, const FoldData& folds, StableBranch branch, double u,
              double v, const QuadratureOptions& opts = {1e-14, 1e-11, 500});
double quad_I(StableBranch branch, double u, double v, const ReducedParams& rp);

struct PeriodExpansion {
    double leading = 0.0;          ///< I+(f(x-), f(x+)) + I-(f(x+), f(x-))
    double time_plus_branch = 0.0;   ///< I+ term
    double time_minus_branch = 0.0;  ///< I- term
    double correction_coeff = 0.0;  ///< coefficient of nu^(-2/3)
    double airy_zeta = kAiryZeta;

    double total(double nu) const { return leading + std::pow(nu, -2.0 / 3.0) * correction_coeff; }
};

struct AmplitudeExpansion {
    double ax_leading = 0.0;     ///< x~- - x~+
    double ax_correction = 0.0;  ///< coefficient of nu^(-2/3)
    double ay_leading = 0.0;     ///< f(x+) - f(x-)

    double ax_total(double nu) const {
        return ax_leading + std::pow(nu, -2.0 / 3.0) * ax_correction;
    }
};

/// Both throw AssumptionError unless the folds straddle g as required and the
/// critical point is unique.
PeriodExpansion period_asymptotic(const Nullclines& nc);
PeriodExpansion period_asymptotic(const ReducedParams& rp);
AmplitudeExpansion amplitude_asymptotic(const Nullclines& nc);
AmplitudeExpansion amplitude_asymptotic(const ReducedParams& rp);

/// Integral from v to u of dw / (sqrt(w) (k - w)) in closed form. Throws
/// DomainError unless u, v, k > 0 and u, v lie strictly on the same side of k.
double phi(double u, double v, double k);

struct PeriodBounds {
    double T_minus = 0.0;
    double T_plus = 0.0;
};

/// Elementary bounds on the leading period obtained by freezing g at its
/// limits (T_minus) and at its fold values (T_plus).
PeriodBounds period_bounds(const Nullclines& nc);
PeriodBounds period_bounds(const ReducedParams& rp);

/// 2c + b (f(x+) - f(x-)).
double amplitude_bound(const ReducedParams& rp);

}  // namespace glacia
