#include "glacia/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "glacia/errors.hpp"

namespace glacia {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

void read(const json& obj, const char* key, double& out, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(where + "." + key + " must be finite");
}

template <typename Int>
void read_int(const json& obj, const char* key, Int& out, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    out = v.get<Int>();
}

void read_bool(const json& obj, const char* key, bool& out, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(where + "." + key + " must be a boolean");
    out = v.get<bool>();
}

std::string read_string(const json& obj, const char* key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

const std::set<std::string> kReducedKeys = {"a", "b", "c", "d", "nu", "x_alpha", "x_xi",
                                             "delta_alpha", "delta_xi"};

}  // namespace

void SweepSpec::validate() const {
    if (points < 2) throw ConfigError("invariant violated: sweep.points >= 2");
    if (!(nu_min > 0.0) || !(nu_max > nu_min)) {
        throw ConfigError("invariant violated: 0 < sweep.nu_min < sweep.nu_max");
    }
}

std::vector<double> SweepSpec::grid() const {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) {
        const double s = static_cast<double>(i) / (points - 1);
        g[i] = spacing == Spacing::Log
                   ? std::exp(std::log(nu_min) + s * (std::log(nu_max) - std::log(nu_min)))
                   : nu_min + s * (nu_max - nu_min);
    }
    g.front() = nu_min;
    g.back() = nu_max;
    return g;
}

ReducedParams Config::reduced() const {
    ReducedParams rp;
    bool derived = false;
    try {
        rp = reduce_from_full(full);
        derived = true;
    } catch (const AssumptionError& e) {
        for (const auto& k : kReducedKeys) {
            if (k != "nu" && !reduced_overrides.contains(k)) {
                throw ConfigError(std::string("reduced parameters unavailable: ") + e.what() +
                                  ", and reduced." + k + " is not given");
            }
        }
    }
    const std::string where = "reduced";
    read(reduced_overrides, "a", rp.a, where);
    read(reduced_overrides, "b", rp.b, where);
    read(reduced_overrides, "c", rp.c, where);
    read(reduced_overrides, "d", rp.d, where);
    read(reduced_overrides, "nu", rp.nu, where);
    read(reduced_overrides, "x_alpha", rp.x_alpha, where);
    read(reduced_overrides, "x_xi", rp.x_xi, where);
    read(reduced_overrides, "delta_alpha", rp.delta_alpha, where);
    read(reduced_overrides, "delta_xi", rp.delta_xi, where);
    if (!derived) rp.sigmoid_family = feedback.sigmoid_family;
    rp.validate();
    return rp;
}

Config config_from_json(const json& doc) {
    reject_unknown(doc,
                   {"_provenance", "constants", "feedback", "overrides", "reduced", "integrator",
                    "limit_cycle", "sweep"},
                   "configuration");
    Config cfg;
    if (doc.contains("_provenance")) cfg.provenance = read_string(doc, "_provenance", "");

    if (doc.contains("constants")) {
        const json& c = doc.at("constants");
        const std::string w = "constants";
        reject_unknown(c, {"Q", "A", "B", "gamma", "tau0", "rho_i", "grav", "s", "m", "c_heat", "h0"},
                       w);
        auto& mc = cfg.constants;
        read(c, "Q", mc.Q, w);
        read(c, "A", mc.A, w);
        read(c, "B", mc.B, w);
        read(c, "gamma", mc.gamma, w);
        read(c, "tau0", mc.tau0, w);
        read(c, "rho_i", mc.rho_i, w);
        read(c, "grav", mc.grav, w);
        read(c, "s", mc.s, w);
        read(c, "m", mc.m, w);
        read(c, "c_heat", mc.c_heat, w);
        read(c, "h0", mc.h0, w);
    }
    cfg.constants.validate();

    if (doc.contains("feedback")) {
        const json& f = doc.at("feedback");
        const std::string w = "feedback";
        reject_unknown(f,
                       {"sigmoid_family", "continental_mode", "alpha0", "alpha1", "lambda_alpha",
                        "delta_lambda", "alpha_minus", "alpha_plus", "theta_alpha", "delta_alpha",
                        "xi_minus", "xi_plus", "theta_xi", "delta_xi"},
                       w);
        auto& fb = cfg.feedback;
        if (f.contains("sigmoid_family")) {
            fb.sigmoid_family = sigmoid_family_from_string(read_string(f, "sigmoid_family", w));
        }
        if (f.contains("continental_mode")) {
            const std::string mode = read_string(f, "continental_mode", w);
            if (mode == "sigmoid") {
                fb.continental_mode = ContinentalMode::Sigmoid;
            } else if (mode == "linear") {
                fb.continental_mode = ContinentalMode::Linear;
            } else {
                throw ConfigError("feedback.continental_mode must be 'sigmoid' or 'linear'");
            }
        }
        read(f, "alpha0", fb.alpha0, w);
        read(f, "alpha1", fb.alpha1, w);
        read(f, "lambda_alpha", fb.lambda_alpha, w);
        read(f, "delta_lambda", fb.delta_lambda, w);
        read(f, "alpha_minus", fb.alpha_minus, w);
        read(f, "alpha_plus", fb.alpha_plus, w);
        read(f, "theta_alpha", fb.theta_alpha, w);
        read(f, "delta_alpha", fb.delta_alpha, w);
        read(f, "xi_minus", fb.xi_minus, w);
        read(f, "xi_plus", fb.xi_plus, w);
        read(f, "theta_xi", fb.theta_xi, w);
        read(f, "delta_xi", fb.delta_xi, w);
    }
    cfg.feedback.validate();

    cfg.scales = derive_scales(cfg.constants);
    cfg.full = FullParams::from_constants(cfg.constants, cfg.feedback);
    if (doc.contains("overrides")) {
        const json& o = doc.at("overrides");
        const std::string w = "overrides";
        reject_unknown(o, {"beta", "mu", "kappa"}, w);
        read(o, "beta", cfg.full.beta, w);
        read(o, "mu", cfg.full.mu, w);
        if (!(cfg.full.mu > 0.0)) throw ConfigError("invariant violated: mu > 0");
        if (o.contains("kappa")) {
            const json& k = o.at("kappa");
            const std::string wk = "overrides.kappa";
            reject_unknown(k, {"value", "slope", "theta_ref"}, wk);
            KappaProfile kp;
            read(k, "value", kp.value, wk);
            read(k, "slope", kp.slope, wk);
            read(k, "theta_ref", kp.theta_ref, wk);
            if (kp.slope < 0.0) throw ConfigError("invariant violated: kappa slope >= 0");
            cfg.full.kappa = kp;
            cfg.scales.kappa = kp;
        }
        cfg.scales.beta = cfg.full.beta;
        cfg.scales.mu = cfg.full.mu;
    }

    if (doc.contains("reduced")) {
        reject_unknown(doc.at("reduced"), kReducedKeys, "reduced");
        cfg.reduced_overrides = doc.at("reduced");
    }

    if (doc.contains("integrator")) {
        const json& i = doc.at("integrator");
        const std::string w = "integrator";
        reject_unknown(i, {"rel_tol", "abs_tol", "max_step", "max_steps", "stiffness_guard"}, w);
        read(i, "rel_tol", cfg.integrator.rel_tol, w);
        read(i, "abs_tol", cfg.integrator.abs_tol, w);
        read(i, "max_step", cfg.integrator.max_step, w);
        read_int(i, "max_steps", cfg.integrator.max_steps, w);
        read_bool(i, "stiffness_guard", cfg.integrator.stiffness_guard, w);
    }
    cfg.integrator.validate();

    if (doc.contains("limit_cycle")) {
        const json& l = doc.at("limit_cycle");
        const std::string w = "limit_cycle";
        reject_unknown(l,
                       {"transient_returns", "average_returns", "period_tol", "max_returns",
                        "samples"},
                       w);
        auto& lc = cfg.limit_cycle;
        read_int(l, "transient_returns", lc.transient_returns, w);
        read_int(l, "average_returns", lc.average_returns, w);
        read(l, "period_tol", lc.period_tol, w);
        read_int(l, "max_returns", lc.max_returns, w);
        read_int(l, "samples", lc.samples, w);
        if (lc.transient_returns < 0 || lc.average_returns < 1 || lc.max_returns < 2 ||
            !(lc.period_tol > 0.0) || lc.samples < 0) {
            throw ConfigError("invariant violated: limit_cycle options out of range");
        }
    }

    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        const std::string w = "sweep";
        reject_unknown(s, {"nu_min", "nu_max", "points", "spacing", "measure", "asymptotic"}, w);
        auto& sw = cfg.sweep;
        read(s, "nu_min", sw.nu_min, w);
        read(s, "nu_max", sw.nu_max, w);
        read_int(s, "points", sw.points, w);
        if (s.contains("spacing")) {
            const std::string sp = read_string(s, "spacing", w);
            if (sp == "log") {
                sw.spacing = Spacing::Log;
            } else if (sp == "linear") {
                sw.spacing = Spacing::Linear;
            } else {
                throw ConfigError("sweep.spacing must be 'log' or 'linear'");
            }
        }
        read_bool(s, "measure", sw.measure, w);
        read_bool(s, "asymptotic", sw.asymptotic, w);
    }
    cfg.sweep.validate();

    // Surface an invalid explicit reduced set at load time.
    if (!cfg.reduced_overrides.empty()) cfg.reduced();
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file " + path);
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
    return config_from_json(doc);
}

json config_to_json(const Config& cfg) {
    const auto& mc = cfg.constants;
    const auto& fb = cfg.feedback;
    json doc;
    if (!cfg.provenance.empty()) doc["_provenance"] = cfg.provenance;
    doc["constants"] = {{"Q", mc.Q},         {"A", mc.A},         {"B", mc.B},
                        {"gamma", mc.gamma}, {"tau0", mc.tau0},   {"rho_i", mc.rho_i},
                        {"grav", mc.grav},   {"s", mc.s},         {"m", mc.m},
                        {"c_heat", mc.c_heat}, {"h0", mc.h0}};
    doc["feedback"] = {
        {"sigmoid_family", to_string(fb.sigmoid_family)},
        {"continental_mode", fb.continental_mode == ContinentalMode::Linear ? "linear" : "sigmoid"},
        {"alpha0", fb.alpha0},
        {"alpha1", fb.alpha1},
        {"lambda_alpha", fb.lambda_alpha},
        {"delta_lambda", fb.delta_lambda},
        {"alpha_minus", fb.alpha_minus},
        {"alpha_plus", fb.alpha_plus},
        {"theta_alpha", fb.theta_alpha},
        {"delta_alpha", fb.delta_alpha},
        {"xi_minus", fb.xi_minus},
        {"xi_plus", fb.xi_plus},
        {"theta_xi", fb.theta_xi},
        {"delta_xi", fb.delta_xi}};
    doc["overrides"] = {{"beta", cfg.full.beta},
                        {"mu", cfg.full.mu},
                        {"kappa",
                         {{"value", cfg.full.kappa.value},
                          {"slope", cfg.full.kappa.slope},
                          {"theta_ref", cfg.full.kappa.theta_ref}}}};
    if (!cfg.reduced_overrides.empty()) doc["reduced"] = cfg.reduced_overrides;
    doc["integrator"] = {{"rel_tol", cfg.integrator.rel_tol},
                         {"abs_tol", cfg.integrator.abs_tol},
                         {"max_steps", cfg.integrator.max_steps},
                         {"stiffness_guard", cfg.integrator.stiffness_guard}};
    if (std::isfinite(cfg.integrator.max_step)) doc["integrator"]["max_step"] = cfg.integrator.max_step;
    const auto& lc = cfg.limit_cycle;
    doc["limit_cycle"] = {{"transient_returns", lc.transient_returns},
                          {"average_returns", lc.average_returns},
                          {"period_tol", lc.period_tol},
                          {"max_returns", lc.max_returns},
                          {"samples", lc.samples}};
    const auto& sw = cfg.sweep;
    doc["sweep"] = {{"nu_min", sw.nu_min},
                    {"nu_max", sw.nu_max},
                    {"points", sw.points},
                    {"spacing", sw.spacing == Spacing::Log ? "log" : "linear"},
                    {"measure", sw.measure},
                    {"asymptotic", sw.asymptotic}};
    return doc;
}

json to_json(const ReducedParams& rp) {
    return {{"a", rp.a},
            {"b", rp.b},
            {"c", rp.c},
            {"d", rp.d},
            {"nu", rp.nu},
            {"x_alpha", rp.x_alpha},
            {"x_xi", rp.x_xi},
            {"delta_alpha", rp.delta_alpha},
            {"delta_xi", rp.delta_xi},
            {"sigmoid_family", to_string(rp.sigmoid_family)}};
}

json to_json(const CriticalPointReport& r) {
    json j = {{"theta", r.location.theta},
              {"lambda", r.location.lambda},
              {"branch", to_string(r.branch)},
              {"trace", r.trace},
              {"determinant", r.determinant},
              {"eigenvalues",
               {{{"re", r.eigenvalues[0].real()}, {"im", r.eigenvalues[0].imag()}},
                {{"re", r.eigenvalues[1].real()}, {"im", r.eigenvalues[1].imag()}}}},
              {"classification", to_string(r.classification)},
              {"dh_dtheta", r.dh_dtheta},
              {"dk_dtheta", r.dk_dtheta},
              {"hopf", r.hopf}};
    j["mu_critical"] = r.mu_critical ? json(*r.mu_critical) : json(nullptr);
    return j;
}

json to_json(const AssumptionReport& r) {
    json j = {{"fold_minus_above_g", r.fold_minus_above},
              {"fold_plus_below_g", r.fold_plus_below},
              {"unique_critical_point", r.unique_critical},
              {"critical_point_unstable", r.unstable},
              {"nu_above_nu_c", r.limit_cycle},
              {"all", r.all()},
              {"nu", r.nu},
              {"x_minus", r.folds.x_minus},
              {"x_plus", r.folds.x_plus},
              {"messages", r.messages}};
    if (r.critical) {
        j["x_c"] = r.critical->x_c;
        j["y_c"] = r.critical->y_c;
        j["nu_c"] = r.critical->nu_c;
    }
    return j;
}

}  // namespace glacia
