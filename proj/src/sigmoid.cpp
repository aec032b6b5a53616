#include "glacia/sigmoid.hpp"

#include <cmath>
#include <numbers>

#include "glacia/errors.hpp"
#include "glacia/roots.hpp"

namespace glacia {

namespace {

constexpr double kTwoOverSqrtPi = 2.0 / 1.772453850905516027298167483341145;

// Derivatives of tanh written in terms of t = tanh(u), s = 1 - t^2.
double tanh_d1(double u) {
    const double t = std::tanh(u);
    return 1.0 - t * t;
}
double tanh_d2(double u) {
    const double t = std::tanh(u);
    return -2.0 * t * (1.0 - t * t);
}
double tanh_d3(double u) {
    const double t = std::tanh(u);
    const double s = 1.0 - t * t;
    return -2.0 * s * s + 4.0 * t * t * s;
}

}  // namespace

std::string_view to_string(SigmoidFamily family) {
    switch (family) {
        case SigmoidFamily::Tanh: return "tanh";
        case SigmoidFamily::Logistic: return "logistic";
        case SigmoidFamily::Algebraic: return "algebraic";
        case SigmoidFamily::Erf: return "erf";
    }
    return "unknown";
}

SigmoidFamily sigmoid_family_from_string(std::string_view name) {
    if (name == "tanh") return SigmoidFamily::Tanh;
    if (name == "logistic") return SigmoidFamily::Logistic;
    if (name == "algebraic") return SigmoidFamily::Algebraic;
    if (name == "erf") return SigmoidFamily::Erf;
    throw ConfigError("unknown sigmoid family '" + std::string(name) +
                      "' (expected tanh, logistic, algebraic or erf)");
}

double sigmoid(SigmoidFamily family, double u) {
    switch (family) {
        case SigmoidFamily::Tanh: return std::tanh(u);
        case SigmoidFamily::Logistic: return std::tanh(0.5 * u);
        case SigmoidFamily::Algebraic: return u / std::sqrt(1.0 + u * u);
        case SigmoidFamily::Erf: return std::erf(u);
    }
    return 0.0;
}

double sigmoid_deriv(SigmoidFamily family, double u) {
    switch (family) {
        case SigmoidFamily::Tanh: return tanh_d1(u);
        case SigmoidFamily::Logistic: return 0.5 * tanh_d1(0.5 * u);
        case SigmoidFamily::Algebraic: {
            const double q = 1.0 + u * u;
            return 1.0 / (q * std::sqrt(q));
        }
        case SigmoidFamily::Erf: return kTwoOverSqrtPi * std::exp(-u * u);
    }
    return 0.0;
}

double sigmoid_deriv2(SigmoidFamily family, double u) {
    switch (family) {
        case SigmoidFamily::Tanh: return tanh_d2(u);
        case SigmoidFamily::Logistic: return 0.25 * tanh_d2(0.5 * u);
        case SigmoidFamily::Algebraic: {
            const double q = 1.0 + u * u;
            return -3.0 * u / (q * q * std::sqrt(q));
        }
        case SigmoidFamily::Erf: return -2.0 * u * kTwoOverSqrtPi * std::exp(-u * u);
    }
    return 0.0;
}

double sigmoid_deriv3(SigmoidFamily family, double u) {
    switch (family) {
        case SigmoidFamily::Tanh: return tanh_d3(u);
        case SigmoidFamily::Logistic: return 0.125 * tanh_d3(0.5 * u);
        case SigmoidFamily::Algebraic: {
            const double q = 1.0 + u * u;
            return (12.0 * u * u - 3.0) / (q * q * q * std::sqrt(q));
        }
        case SigmoidFamily::Erf:
            return (4.0 * u * u - 2.0) * kTwoOverSqrtPi * std::exp(-u * u);
    }
    return 0.0;
}

double sigmoid_max_deriv(SigmoidFamily family) {
    switch (family) {
        case SigmoidFamily::Tanh: return 1.0;
        case SigmoidFamily::Logistic: return 0.5;
        case SigmoidFamily::Algebraic: return 1.0;
        case SigmoidFamily::Erf: return kTwoOverSqrtPi;
    }
    return 0.0;
}

double sigmoid_inverse(SigmoidFamily family, double v) {
    if (!(v > -1.0 && v < 1.0)) {
        throw RangeError("sigmoid_inverse: value " + std::to_string(v) +
                         " outside the open range (-1, 1)");
    }
    switch (family) {
        case SigmoidFamily::Tanh: return std::atanh(v);
        case SigmoidFamily::Logistic: return 2.0 * std::atanh(v);
        case SigmoidFamily::Algebraic: return v / std::sqrt(1.0 - v * v);
        case SigmoidFamily::Erf: {
            // erf has no inverse in <cmath>; expand a bracket and refine.
            double hi = 1.0;
            while (std::erf(hi) < std::abs(v)) hi *= 2.0;
            const double u = find_root([&](double s) { return std::erf(s) - std::abs(v); },
                                       0.0, hi, RootOptions{.x_tol = 1e-15});
            return v < 0.0 ? -u : u;
        }
    }
    return 0.0;
}

double sigmoid_deriv_inverse(SigmoidFamily family, double slope) {
    const double peak = sigmoid_max_deriv(family);
    if (!(slope > 0.0 && slope <= peak)) {
        throw RangeError("sigmoid_deriv_inverse: slope " + std::to_string(slope) +
                         " outside (0, " + std::to_string(peak) + "]");
    }
    switch (family) {
        case SigmoidFamily::Tanh: return std::atanh(std::sqrt(1.0 - slope));
        case SigmoidFamily::Logistic: return 2.0 * std::atanh(std::sqrt(1.0 - 2.0 * slope));
        case SigmoidFamily::Algebraic: return std::sqrt(std::pow(slope, -2.0 / 3.0) - 1.0);
        case SigmoidFamily::Erf: return std::sqrt(std::log(kTwoOverSqrtPi / slope));
    }
    return 0.0;
}

}  // namespace glacia
