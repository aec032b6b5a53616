#include "glacia/nullclines.hpp"

#include <cmath>
#include <string>

#include "glacia/errors.hpp"
#include "glacia/roots.hpp"

namespace glacia {

namespace {

void require(bool ok, const char* invariant) {
    if (!ok) throw ConfigError(std::string("invariant violated: ") + invariant);
}

double central_difference(const std::function<double(double)>& fn, double x) {
    const double h = 1e-4 * std::max(1.0, std::abs(x));
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

/// Single root of `fn` inside `win`; widens the window up to 8 times.
double sole_root_in(const std::function<double(double)>& fn, Interval win, const char* what) {
    for (int attempt = 0; attempt < 4; ++attempt) {
        const auto br = sign_scan([&](double x) -> std::optional<double> { return fn(x); },
                                  win.lo, win.hi, 2048);
        if (!br.empty()) {
            return br.front().lo == br.front().hi ? br.front().lo
                                                  : find_root(fn, br.front().lo, br.front().hi,
                                                              RootOptions{.x_tol = 1e-14});
        }
        const double w = win.hi - win.lo;
        win = {win.lo - w / 2.0, win.hi + w / 2.0};
    }
    throw AssumptionError(std::string("no ") + what + " found in the search window");
}

}  // namespace

void ReducedParams::validate() const {
    require(b > 0.0, "b > 0");
    require(c > 0.0, "c > 0");
    require(d >= 0.0 && d < 1.0, "0 <= d < 1");
    require(nu > 0.0, "nu > 0");
    require(delta_alpha > 0.0, "delta_alpha > 0");
    require(delta_xi > 0.0, "delta_xi > 0");
    require(std::isfinite(a) && std::isfinite(x_alpha) && std::isfinite(x_xi),
            "a, x_alpha, x_xi finite");
    require(delta_alpha < c * sigmoid_max_deriv(sigmoid_family),
            "delta_alpha < c * max sigmoid' (f must have a minimum and a maximum)");
}

double Nullclines::d3f(double x) const {
    return central_difference([this](double s) { return d2f(s); }, x);
}

double Nullclines::d3g(double x) const {
    return central_difference([this](double s) { return d2g(s); }, x);
}

double Nullclines::f_inflection() const {
    return sole_root_in([this](double x) { return d2f(x); }, search_window(),
                        "inflection point of f");
}

double Nullclines::g_inflection() const {
    return sole_root_in([this](double x) { return d2g(x); }, search_window(),
                        "inflection point of g");
}

double SigmoidNullclines::f(double x) const {
    const double u = (x - rp_.x_alpha) / rp_.delta_alpha;
    return (rp_.a + rp_.c * sigmoid(rp_.sigmoid_family, u) - x) / rp_.b;
}

double SigmoidNullclines::df(double x) const {
    const double u = (x - rp_.x_alpha) / rp_.delta_alpha;
    return (rp_.c * sigmoid_deriv(rp_.sigmoid_family, u) / rp_.delta_alpha - 1.0) / rp_.b;
}

double SigmoidNullclines::d2f(double x) const {
    const double u = (x - rp_.x_alpha) / rp_.delta_alpha;
    return rp_.c * sigmoid_deriv2(rp_.sigmoid_family, u) /
           (rp_.delta_alpha * rp_.delta_alpha * rp_.b);
}

double SigmoidNullclines::d3f(double x) const {
    const double u = (x - rp_.x_alpha) / rp_.delta_alpha;
    const double da = rp_.delta_alpha;
    return rp_.c * sigmoid_deriv3(rp_.sigmoid_family, u) / (da * da * da * rp_.b);
}

double SigmoidNullclines::g(double x) const {
    return 1.0 + rp_.d * sigmoid(rp_.sigmoid_family, (x - rp_.x_xi) / rp_.delta_xi);
}

double SigmoidNullclines::dg(double x) const {
    return rp_.d * sigmoid_deriv(rp_.sigmoid_family, (x - rp_.x_xi) / rp_.delta_xi) /
           rp_.delta_xi;
}

double SigmoidNullclines::d2g(double x) const {
    const double dx = rp_.delta_xi;
    return rp_.d * sigmoid_deriv2(rp_.sigmoid_family, (x - rp_.x_xi) / dx) / (dx * dx);
}

double SigmoidNullclines::d3g(double x) const {
    const double dx = rp_.delta_xi;
    return rp_.d * sigmoid_deriv3(rp_.sigmoid_family, (x - rp_.x_xi) / dx) / (dx * dx * dx);
}

Interval SigmoidNullclines::search_window() const {
    const double lo = std::min(rp_.x_alpha - 10.0 * rp_.delta_alpha, rp_.x_xi - 10.0 * rp_.delta_xi);
    const double hi = std::max(rp_.x_alpha + 10.0 * rp_.delta_alpha, rp_.x_xi + 10.0 * rp_.delta_xi);
    return {lo, hi};
}

std::optional<std::pair<double, double>> SigmoidNullclines::closed_form_folds() const {
    const double slope = rp_.delta_alpha / rp_.c;
    if (!(slope < sigmoid_max_deriv(rp_.sigmoid_family))) return std::nullopt;
    const double u = sigmoid_deriv_inverse(rp_.sigmoid_family, slope);
    return std::make_pair(rp_.x_alpha - rp_.delta_alpha * u, rp_.x_alpha + rp_.delta_alpha * u);
}

}  // namespace glacia
