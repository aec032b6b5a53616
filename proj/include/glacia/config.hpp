#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "glacia/dynamics.hpp"
#include "glacia/full_model.hpp"
#include "glacia/reduced_model.hpp"

namespace glacia {

enum class Spacing { Log, Linear };

struct SweepSpec {
    double nu_min = 1e2;
    double nu_max = 1e6;
    int points = 9;
    Spacing spacing = Spacing::Log;
    bool measure = true;
    bool asymptotic = true;

    void validate() const;
    std::vector<double> grid() const;
};

/// Everything a run needs, as loaded from a JSON document.
///
/// Top-level keys (all optional): "constants", "feedback", "overrides"
/// (beta, mu, kappa = {value, slope, theta_ref}), "reduced" (any subset of
/// a, b, c, d, nu, x_alpha, x_xi, delta_alpha, delta_xi overriding the values
/// derived from the full model), "integrator", "limit_cycle", "sweep" and a
/// free-form "_provenance" string. Unknown keys are rejected.
struct Config {
    ModelConstants constants;
    FeedbackParams feedback;
    FullParams full;
    DerivedScales scales;
    nlohmann::json reduced_overrides = nlohmann::json::object();
    IntegratorConfig integrator;
    LimitCycleOptions limit_cycle;
    SweepSpec sweep;
    std::string provenance;

    /// Reduced parameters: derived from the full model when possible, then
    /// overridden key by key. Throws ConfigError when neither gives a
    /// complete, valid set.
    ReducedParams reduced() const;
    /// xi_minus + xi_plus, the factor linking reduced and full variables.
    double xi_sum() const { return feedback.xi_minus + feedback.xi_plus; }
};

/// Throws ConfigError with a diagnostic naming the offending key or invariant.
Config config_from_json(const nlohmann::json& doc);
Config load_config(const std::string& path);
nlohmann::json config_to_json(const Config& cfg);

nlohmann::json to_json(const ReducedParams& rp);
nlohmann::json to_json(const CriticalPointReport& r);
nlohmann::json to_json(const AssumptionReport& r);

}  // namespace glacia
