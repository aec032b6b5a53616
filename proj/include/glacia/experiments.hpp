#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "glacia/asymptotics.hpp"
#include "glacia/config.hpp"
#include "glacia/csv.hpp"
#include "glacia/dynamics.hpp"

namespace glacia {

struct SweepRow {
    double nu = 0.0;
    std::optional<double> period_measured;
    double period_asymptotic = 0.0;
    double period_leading = 0.0;
    double t_minus = 0.0;
    double t_plus = 0.0;
    std::optional<double> amplitude_x_measured;
    std::optional<double> amplitude_y_measured;
    bool converged = false;
    std::string error;  ///< why the measurement failed, empty otherwise
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> warnings;
};

/// Worker count: `requested` if positive, else GLACIA_WORKERS, else the
/// hardware concurrency.
int resolve_workers(int requested = 0);

/// One row per grid point, computed independently and returned in grid order.
/// Per-row failures are recorded in SweepRow::error.
SweepResult run_sweep(const SweepSpec& spec, const ReducedParams& rp,
                      const IntegratorConfig& cfg = {}, const LimitCycleOptions& lc = {},
                      int workers = 0);
CsvTable sweep_table(const SweepResult& result);

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;  ///< log of the fitted prefactor
    /// Fitted prefactor divided by the asymptotic correction coefficient.
    double prefactor_ratio = 0.0;
    int points_used = 0;
};

/// Least-squares fit of log(measured - leading) against log(nu). Rows whose
/// difference is at most `noise_floor` are excluded. Throws AssumptionError
/// with fewer than two usable rows.
PowerLawFit fit_power_law(const SweepResult& result, double correction_coeff,
                          double noise_floor);

/// Uniformly sampled reduced trajectory, columns t,x,y or, when `dimensional`,
/// t_years,T_kelvin,L_meters. `samples` intervals give samples + 1 rows.
CsvTable run_timeseries(const ReducedParams& rp, double duration, int samples,
                        bool dimensional, const DerivedScales& ds, double xi_sum,
                        const IntegratorConfig& cfg = {},
                        std::optional<Vec2> seed = std::nullopt);
/// Full-model trajectory, columns tau,theta,lambda or t_years,T_kelvin,L_meters.
CsvTable run_timeseries(const FullParams& p, const FullState& seed, double duration, int samples,
                        bool dimensional, const DerivedScales& ds,
                        const IntegratorConfig& cfg = {});

/// Random reduced parameter set around `base` satisfying the relaxation
/// assumptions (folds straddling g, one unstable critical point).
ReducedParams random_admissible_reduced(std::mt19937_64& rng, const ReducedParams& base);

/// Random full-model configuration with at least one hyperbolic critical
/// point, together with those points.
struct RandomFullConfig {
    FullParams params;
    std::vector<CriticalPointReport> points;
};
RandomFullConfig random_full_with_critical_points(std::mt19937_64& rng,
                                                  const FullParams& base);

enum class PerturbationOutcome { Converged, Diverged, Inconclusive };
std::string to_string(PerturbationOutcome o);

/// Integrates the full model from a small perturbation of a critical point
/// and reports whether the distance decays or grows.
PerturbationOutcome perturbation_outcome(const FullParams& p, const CriticalPointReport& point,
                                         double perturbation = 1e-6);

enum class Verdict { Pass, Fail, NotApplicable };
std::string to_string(Verdict v);

struct CriterionResult {
    int id = 0;
    std::string name;
    std::string target;
    std::string tolerance;
    nlohmann::json computed;
    Verdict verdict = Verdict::Fail;
    std::string reason;
    double seconds = 0.0;
};

struct ReportOptions {
    std::uint64_t seed = 20240607;
    int workers = 0;
};

struct Report {
    std::string source;
    std::uint64_t seed = 0;
    std::vector<CriterionResult> criteria;

    bool all_pass() const;
    nlohmann::json to_json() const;
    std::string to_text() const;
};

/// Evaluates every acceptance criterion on the configuration. A failing
/// sub-computation marks its criterion as failed instead of aborting.
Report reproduce_report(const Config& cfg, const ReportOptions& opts = {},
                        const std::string& source = "");

}  // namespace glacia
