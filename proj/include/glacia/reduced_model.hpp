#pragma once

#include <string>
#include <vector>

#include "glacia/full_model.hpp"
#include "glacia/nullclines.hpp"

namespace glacia {

struct FoldData {
    double x_minus = 0.0;  ///< minimum of f
    double x_plus = 0.0;   ///< maximum of f
    double f_at_minus = 0.0;
    double f_at_plus = 0.0;
    double x_tilde_minus = 0.0;  ///< point on the right branch with f = f(x_minus)
    double x_tilde_plus = 0.0;   ///< point on the left branch with f = f(x_plus)
};

/// Stable branches of f: s_minus on (-inf, x_minus], s_plus on [x_plus, inf).
enum class StableBranch { Minus, Plus };

struct ReducedState {
    double x = 0.0;
    double y = 0.0;
};

struct ReducedRates {
    double dx = 0.0;
    double dy = 0.0;
};

/// Reduced coefficients of a full-model configuration. Requires the linear
/// continental albedo and kappa = 0; throws AssumptionError otherwise.
ReducedParams reduce_from_full(const FullParams& p);

/// Maps a full-model state and its rates into reduced coordinates
/// (x = theta, y = 8 lambda / S, t = sqrt(2 S) tau, S = xi_minus + xi_plus).
ReducedState to_reduced_state(const FullState& s, const FeedbackParams& fb);
ReducedRates to_reduced_rates(const FullRates& r, const FeedbackParams& fb);

double f_eval(double x, const ReducedParams& rp);
double g_eval(double x, const ReducedParams& rp);

/// Throws DomainError for y < 0.
ReducedRates reduced_rhs(const ReducedState& s, const ReducedParams& rp);
ReducedRates reduced_rhs(const ReducedState& s, double nu, const Nullclines& nc);

/// Extrema of f and the landing points on the opposite branches. Throws
/// AssumptionError unless f has exactly one minimum followed by one maximum.
FoldData find_folds(const Nullclines& nc);
FoldData find_folds(const ReducedParams& rp);

/// x on the given stable branch with f(x) = w. Throws RangeError when w is
/// outside the branch range.
double branch_inverse(const Nullclines& nc, const FoldData& folds, StableBranch branch, double w);
double branch_inverse(double w, StableBranch branch, const ReducedParams& rp);

struct CriticalPoint {
    double x_c = 0.0;
    double y_c = 0.0;
    /// nu at which the trace of the Jacobian vanishes, sqrt(f(x_c)) / f'(x_c).
    double nu_c = 0.0;
};

struct ScanOptions {
    int cells = 1024;
};

/// The unique root of f - g between the folds. Throws AssumptionError for
/// zero or several roots there.
CriticalPoint critical_point(const Nullclines& nc, const ScanOptions& opts = {});
CriticalPoint critical_point(const ReducedParams& rp, const ScanOptions& opts = {});

struct CriticalPointEstimate {
    double estimate = 0.0;
    double bound = 0.0;  ///< C (x_plus - x_minus)^3
    double C = 0.0;      ///< max(|f'''|, |g'''|) / 3 on [x_minus, x_plus]
    /// g'(x_xi) - f'(x_alpha). The Taylor remainder is divided by this, so
    /// `bound` alone is only guaranteed when its magnitude is at least 1.
    double slope_gap = 0.0;
};

/// Linearizes f and g at their inflection points and intersects the lines.
CriticalPointEstimate critical_point_approx(const Nullclines& nc);
CriticalPointEstimate critical_point_approx(const ReducedParams& rp);

struct AssumptionReport {
    bool fold_minus_above = false;  ///< f(x_minus) > g(x_minus)
    bool fold_plus_below = false;   ///< f(x_plus) < g(x_plus)
    bool unique_critical = false;
    bool unstable = false;          ///< g'(x_c) > f'(x_c) > 0
    bool limit_cycle = false;       ///< nu > nu_c

    FoldData folds;
    std::optional<CriticalPoint> critical;
    double nu = 0.0;
    std::vector<std::string> messages;

    bool all() const {
        return fold_minus_above && fold_plus_below && unique_critical && unstable && limit_cycle;
    }
};

/// Folds must exist (throws AssumptionError otherwise); everything else is
/// reported through flags.
AssumptionReport check_assumptions(const Nullclines& nc, double nu);
AssumptionReport check_assumptions(const ReducedParams& rp);

}  // namespace glacia
