#include "glacia/parametrization.hpp"

#include <cmath>
#include <string>

#include "glacia/errors.hpp"

namespace glacia {

namespace {

void require(bool ok, const char* invariant) {
    if (!ok) throw ConfigError(std::string("invariant violated: ") + invariant);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void ModelConstants::validate() const {
    require(Q > 0.0, "Q > 0");
    require(B > 0.0, "B > 0");
    require(std::isfinite(A), "A finite");
    require(gamma > 0.0 && gamma < 1.0, "0 < gamma < 1");
    require(tau0 > 0.0, "tau0 > 0");
    require(rho_i > 0.0, "rho_i > 0");
    require(grav > 0.0, "grav > 0");
    require(s > 0.0, "s > 0");
    require(m > 0.0, "m > 0");
    require(c_heat > 0.0, "c_heat > 0");
    require(std::isfinite(h0), "h0 finite");
}

void FeedbackParams::validate() const {
    require(in_unit(alpha0) && in_unit(alpha1) && alpha0 <= alpha1,
            "0 <= alpha0 <= alpha1 <= 1");
    require(in_unit(alpha_minus) && in_unit(alpha_plus) && alpha_minus >= alpha_plus,
            "0 <= alpha_plus <= alpha_minus <= 1");
    require(xi_minus > 0.0 && xi_minus <= xi_plus, "0 < xi_minus <= xi_plus");
    require(delta_alpha > 0.0, "delta_alpha > 0");
    require(delta_xi > 0.0, "delta_xi > 0");
    if (continental_mode == ContinentalMode::Sigmoid) {
        require(delta_lambda > 0.0, "delta_lambda > 0");
    }
}

DerivedScales derive_scales(const ModelConstants& mc) {
    const double H2 = 4.0 * mc.tau0 / (3.0 * mc.rho_i * mc.grav);
    return derive_scales(mc, KappaProfile::constant(mc.s * mc.h0 / H2));
}

DerivedScales derive_scales(const ModelConstants& mc, const KappaProfile& kappa_override) {
    mc.validate();
    DerivedScales ds;
    ds.H2 = 4.0 * mc.tau0 / (3.0 * mc.rho_i * mc.grav);
    ds.beta = 4.0 * mc.A / mc.Q;
    const double m_per_second = mc.m / kSecondsPerYear;
    ds.mu = 1.5 * mc.B * ds.H2 / (m_per_second * mc.s * mc.c_heat);
    ds.kappa = kappa_override;
    ds.theta_per_kelvin = 4.0 * mc.B / mc.Q;
    ds.lambda_per_meter = mc.s * mc.s / ds.H2;
    ds.tau_per_year = (2.0 / 3.0) * mc.m * mc.s / ds.H2;
    return ds;
}

double alpha_c(double lambda, const FeedbackParams& p) {
    if (p.continental_mode == ContinentalMode::Linear) return p.alpha0 + p.alpha1 * lambda;
    const double u = (lambda - p.lambda_alpha) / p.delta_lambda;
    return 0.5 * (p.alpha0 + p.alpha1 + (p.alpha1 - p.alpha0) * sigmoid(p.sigmoid_family, u));
}

double alpha_c_deriv(double lambda, const FeedbackParams& p) {
    if (p.continental_mode == ContinentalMode::Linear) return p.alpha1;
    const double u = (lambda - p.lambda_alpha) / p.delta_lambda;
    return 0.5 * (p.alpha1 - p.alpha0) * sigmoid_deriv(p.sigmoid_family, u) / p.delta_lambda;
}

double alpha_c_inverse(double albedo, const FeedbackParams& p) {
    if (p.continental_mode == ContinentalMode::Linear) {
        if (!(albedo >= p.alpha0 && albedo <= p.alpha1) || p.alpha1 == 0.0) {
            throw RangeError("continental albedo " + std::to_string(albedo) +
                             " outside [alpha0, alpha1]");
        }
        return (albedo - p.alpha0) / p.alpha1;
    }
    const double span = p.alpha1 - p.alpha0;
    if (!(span > 0.0)) throw RangeError("continental albedo is constant; no inverse");
    const double v = (2.0 * albedo - p.alpha0 - p.alpha1) / span;
    if (!(v > -1.0 && v < 1.0)) {
        throw RangeError("continental albedo " + std::to_string(albedo) +
                         " outside (alpha0, alpha1)");
    }
    return p.lambda_alpha + p.delta_lambda * sigmoid_inverse(p.sigmoid_family, v);
}

double alpha_o(double theta, const FeedbackParams& p) {
    const double u = (theta - p.theta_alpha) / p.delta_alpha;
    return 0.5 * (p.alpha_plus + p.alpha_minus +
                  (p.alpha_plus - p.alpha_minus) * sigmoid(p.sigmoid_family, u));
}

double alpha_o_deriv(double theta, const FeedbackParams& p) {
    const double u = (theta - p.theta_alpha) / p.delta_alpha;
    return 0.5 * (p.alpha_plus - p.alpha_minus) * sigmoid_deriv(p.sigmoid_family, u) /
           p.delta_alpha;
}

double xi_eval(double theta, const FeedbackParams& p) {
    const double u = (theta - p.theta_xi) / p.delta_xi;
    return 0.5 * (p.xi_plus + p.xi_minus + (p.xi_plus - p.xi_minus) * sigmoid(p.sigmoid_family, u));
}

double xi_deriv(double theta, const FeedbackParams& p) {
    const double u = (theta - p.theta_xi) / p.delta_xi;
    return 0.5 * (p.xi_plus - p.xi_minus) * sigmoid_deriv(p.sigmoid_family, u) / p.delta_xi;
}

namespace {

double snowline_root(double lambda, double kappa) {
    if (!(lambda > 0.0)) {
        throw DomainError("lambda0: ice extent must be positive (got " +
                          std::to_string(lambda) + ")");
    }
    const double arg = kappa + 2.0 * lambda + 0.25;
    if (arg < 0.0) {
        throw DomainError("lambda0: kappa + 2 lambda + 1/4 < 0 (snow line inconsistent with "
                          "ice sheet size)");
    }
    return std::sqrt(arg);
}

}  // namespace

// Rationalised forms: the textbook expression cancels catastrophically as
// lambda -> 0.
double lambda0_eval(double lambda, double kappa) {
    const double r = snowline_root(lambda, kappa);
    const double p = kappa + lambda + 0.5;
    const double q = 1.0 - (kappa + lambda) * (kappa + lambda) / lambda;
    return q / (r + p);
}

double lambda0_dlambda(double lambda, double kappa) {
    const double r = snowline_root(lambda, kappa);
    const double p = kappa + lambda + 0.5;
    const double q = 1.0 - (kappa + lambda) * (kappa + lambda) / lambda;
    const double dq = (kappa - lambda) * (kappa + lambda) / (lambda * lambda);
    const double s = r + p;
    return (dq * s - q * (1.0 + 1.0 / r)) / (s * s);
}

double lambda0_dkappa(double lambda, double kappa) {
    const double r = snowline_root(lambda, kappa);
    return -(kappa + 2.0 * lambda) / (lambda * r * (0.5 + r));
}

double temperature_kelvin(double theta, const DerivedScales& ds) {
    return theta / ds.theta_per_kelvin;
}
double theta_from_kelvin(double kelvin, const DerivedScales& ds) {
    return kelvin * ds.theta_per_kelvin;
}
double extent_meters(double lambda, const DerivedScales& ds) { return lambda / ds.lambda_per_meter; }
double lambda_from_meters(double meters, const DerivedScales& ds) {
    return meters * ds.lambda_per_meter;
}
double tau_to_years(double tau, const DerivedScales& ds) { return tau / ds.tau_per_year; }
double years_to_tau(double years, const DerivedScales& ds) { return years * ds.tau_per_year; }

double reduced_time_to_years(double t, double xi_sum, const DerivedScales& ds) {
    return tau_to_years(t / std::sqrt(2.0 * xi_sum), ds);
}
double years_to_reduced_time(double years, double xi_sum, const DerivedScales& ds) {
    return years_to_tau(years, ds) * std::sqrt(2.0 * xi_sum);
}

}  // namespace glacia
