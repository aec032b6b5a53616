#pragma once

#include "glacia/sigmoid.hpp"

namespace glacia {

/// Dimensional constants of the energy/mass balance model (SI units unless
/// noted; m is in metres per year).
struct ModelConstants {
    double Q = 1361.0;       ///< solar constant, W m^-2
    double A = -267.96;      ///< OLR intercept, W m^-2 (Kelvin convention)
    double B = 1.74;         ///< OLR slope, W m^-2 K^-1
    double gamma = 0.3;      ///< continent fraction
    double tau0 = 0.3e5;     ///< ice yield stress, Pa
    double rho_i = 0.92e3;   ///< ice density, kg m^-3
    double grav = 9.81;      ///< gravitational acceleration, m s^-2
    double s = 0.4e-3;       ///< snow-line slope
    double m = 0.5;          ///< ablation rate, m yr^-1
    double c_heat = 1e7;     ///< atmosphere thermal capacity, J m^-2 K^-1
    double h0 = 1.2e3;       ///< snow-line height over the Arctic, m

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;
};

/// Snow-line height as a function of temperature: kappa(theta) =
/// value + slope * (theta - theta_ref). slope >= 0; constant by default.
struct KappaProfile {
    double value = 0.0;
    double slope = 0.0;
    double theta_ref = 0.0;

    double operator()(double theta) const { return value + slope * (theta - theta_ref); }
    double deriv() const { return slope; }

    static KappaProfile constant(double k) { return {k, 0.0, 0.0}; }
};

/// Nondimensional parameters and the factors converting to physical units.
struct DerivedScales {
    double H2 = 0.0;                ///< H^2 = 4 tau0 / (3 rho_i g), m
    double beta = 0.0;              ///< 4A/Q (see README for the sign convention)
    double mu = 0.0;                ///< (3/2) B H^2 / (m s c), with m in m/s
    KappaProfile kappa;             ///< s h0 / H^2 unless overridden
    double theta_per_kelvin = 0.0;  ///< 4B/Q
    double lambda_per_meter = 0.0;  ///< s^2 / H^2
    double tau_per_year = 0.0;      ///< (2/3) m s / H^2
};

constexpr double kSecondsPerYear = 365.25 * 86400.0;

/// Computes the derived scales. Unless `kappa_override` is given, kappa is
/// the constant s h0 / H^2.
DerivedScales derive_scales(const ModelConstants& mc);
DerivedScales derive_scales(const ModelConstants& mc, const KappaProfile& kappa_override);

enum class ContinentalMode {
    Sigmoid,  ///< smooth transition between alpha0 and alpha1
    Linear,   ///< alpha0 + alpha1 * lambda
};

/// Sigmoid feedback parametrisations for the continental and oceanic albedo
/// and the accumulation/ablation ratio xi.
struct FeedbackParams {
    SigmoidFamily sigmoid_family = SigmoidFamily::Tanh;
    ContinentalMode continental_mode = ContinentalMode::Sigmoid;

    double alpha0 = 0.25;
    double alpha1 = 1.0;
    double lambda_alpha = 0.1;
    double delta_lambda = 0.05;

    double alpha_minus = 0.6;
    double alpha_plus = 0.22;
    double theta_alpha = 1.4;
    double delta_alpha = 0.15;

    double xi_minus = 0.1;
    double xi_plus = 0.5;
    double theta_xi = 1.39;
    double delta_xi = 0.025;

    void validate() const;
};

// Continental albedo. Nondecreasing in lambda.
double alpha_c(double lambda, const FeedbackParams& p);
double alpha_c_deriv(double lambda, const FeedbackParams& p);
/// Ice extent at which alpha_c equals `albedo`. Throws RangeError when the
/// albedo is outside [alpha0, alpha1] (outside the open interval in sigmoid
/// mode, where the limits are never attained).
double alpha_c_inverse(double albedo, const FeedbackParams& p);

// Oceanic albedo. Nonincreasing in theta.
double alpha_o(double theta, const FeedbackParams& p);
double alpha_o_deriv(double theta, const FeedbackParams& p);

// Accumulation/ablation ratio. Nondecreasing in theta.
double xi_eval(double theta, const FeedbackParams& p);
double xi_deriv(double theta, const FeedbackParams& p);

/// Fraction of the ice sheet below the snow line,
/// (-(kappa + lambda + 1/2) + sqrt(kappa + 2 lambda + 1/4)) / lambda.
/// Throws DomainError for lambda <= 0 or a negative square-root argument.
double lambda0_eval(double lambda, double kappa);
double lambda0_dlambda(double lambda, double kappa);
double lambda0_dkappa(double lambda, double kappa);

// Conversions between nondimensional and physical quantities. Reduced time
// t is related to tau by t = sqrt(2 (xi_minus + xi_plus)) tau.
double temperature_kelvin(double theta, const DerivedScales& ds);
double theta_from_kelvin(double kelvin, const DerivedScales& ds);
double extent_meters(double lambda, const DerivedScales& ds);
double lambda_from_meters(double meters, const DerivedScales& ds);
double tau_to_years(double tau, const DerivedScales& ds);
double years_to_tau(double years, const DerivedScales& ds);
double reduced_time_to_years(double t, double xi_sum, const DerivedScales& ds);
double years_to_reduced_time(double years, double xi_sum, const DerivedScales& ds);

}  // namespace glacia
