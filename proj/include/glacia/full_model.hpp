#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "glacia/parametrization.hpp"

namespace glacia {

/// Everything the (theta, lambda) system needs.
struct FullParams {
    ModelConstants constants;
    FeedbackParams feedback;
    double beta = 0.0;
    double mu = 0.0;
    KappaProfile kappa;

    double gamma() const { return constants.gamma; }

    /// Parameters derived from the constants (beta = 4A/Q, mu, kappa = s h0/H^2).
    static FullParams from_constants(const ModelConstants& mc, const FeedbackParams& fb);
};

struct FullState {
    double theta = 0.0;
    double lambda = 0.0;
};

struct FullRates {
    double dtheta = 0.0;
    double dlambda = 0.0;
};

struct ValidityReport {
    bool not_stagnant = true;         ///< lambda0 >= 0
    bool within_max_size = true;      ///< lambda <= 1
    bool snowline_consistent = true;  ///< 2 lambda + kappa >= 0 when kappa < 0

    bool all() const { return not_stagnant && within_max_size && snowline_consistent; }
};

/// Partial derivatives of (F, G) with respect to (theta, lambda).
struct Jacobian {
    double F_theta = 0.0;
    double F_lambda = 0.0;
    double G_theta = 0.0;
    double G_lambda = 0.0;

    double trace() const { return F_theta + G_lambda; }
    double det() const { return F_theta * G_lambda - F_lambda * G_theta; }
};

enum class LambdaBranch { Plus, Minus };

enum class StabilityClass {
    StableNode,
    StableFocus,
    UnstableNode,
    UnstableFocus,
    Saddle,
    Degenerate,  ///< det J or tr J vanishes (non-hyperbolic point)
};

std::string to_string(StabilityClass c);
std::string to_string(LambdaBranch b);
bool is_stable(StabilityClass c);

struct CriticalPointReport {
    FullState location;
    LambdaBranch branch = LambdaBranch::Plus;
    Jacobian jacobian;
    double trace = 0.0;
    double determinant = 0.0;
    std::array<std::complex<double>, 2> eigenvalues{};
    StabilityClass classification = StabilityClass::Degenerate;
    double dh_dtheta = 0.0;
    double dk_dtheta = 0.0;
    /// mu at which tr J = 0; set for points on k+ where h is increasing.
    std::optional<double> mu_critical;
    /// A Hopf bifurcation happens at mu_critical (det J > 0 there).
    bool hopf = false;
};

struct CriticalPointSearch {
    std::vector<CriticalPointReport> points;
    std::vector<std::string> warnings;
};

/// Right-hand side F, G. Throws DomainError outside the model domain.
FullRates full_rhs(const FullState& state, const FullParams& p);

/// Analytic Jacobian of (F, G).
Jacobian full_jacobian(const FullState& state, const FullParams& p);

ValidityReport check_validity(const FullState& state, const FullParams& p);

/// Albedo the continent must have for F = 0 at this temperature.
double required_continental_albedo(double theta, const FullParams& p);

/// theta-nullcline h(theta). Throws RangeError when the required albedo is
/// outside the range of alpha_c.
double theta_nullcline(double theta, const FullParams& p);
double theta_nullcline_deriv(double theta, const FullParams& p);

/// True when kappa(theta) <= xi / (4 (2 + xi)).
bool lambda_nullcline_exists(double theta, const FullParams& p);
/// lambda-nullcline branches k+ / k-. Throws RangeError when no ice sheet
/// can exist at this temperature.
double lambda_nullcline(double theta, LambdaBranch branch, const FullParams& p);
/// dk/dtheta at (theta, k(theta)) by implicit differentiation of G = 0.
double lambda_nullcline_deriv(double theta, LambdaBranch branch, const FullParams& p);

struct CriticalPointOptions {
    int grid_cells = 512;
    double theta_tol = 1e-12;
    double residual_tol = 1e-8;
};

CriticalPointSearch find_critical_points(const FullParams& p, double theta_lo, double theta_hi,
                                         const CriticalPointOptions& opts = {});

/// Full stability report for a critical point. The branch is the lambda
/// nullcline closest to the point. Throws AssumptionError if |F| or |G|
/// exceeds `residual_tol` there.
CriticalPointReport classify_stability(const FullState& point, const FullParams& p,
                                       double residual_tol = 1e-8);

/// mu with tr J(mu) = 0 at a critical point. Throws DomainError when
/// (1 - gamma) alpha_o' + 1 vanishes.
double mu_critical(const FullState& point, const FullParams& p);

}  // namespace glacia
