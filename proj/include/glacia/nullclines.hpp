#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "glacia/sigmoid.hpp"

namespace glacia {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Reduced-system coefficients: dx/dt = nu (f(x) - y), dy/dt = sqrt(y) (g(x) - y) with
/// f(x) = (a + c s((x - x_alpha)/delta_alpha) - x) / b and g(x) = 1 + d s((x - x_xi)/delta_xi).
struct ReducedParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double nu = 1.0;
    double x_alpha = 0.0;
    double x_xi = 0.0;
    double delta_alpha = 0.1;
    double delta_xi = 0.1;
    SigmoidFamily sigmoid_family = SigmoidFamily::Tanh;

    /// Throws ConfigError naming the first violated invariant (including the
    /// requirement delta_alpha < c * max s' that gives f two extrema).
    void validate() const;
};

/// The pair of nullclines (f, g) of a planar slow-fast system. f must have a
/// single nondegenerate minimum followed by a maximum; g must be bounded and
/// nondecreasing.
class Nullclines {
public:
    virtual ~Nullclines() = default;

    virtual double f(double x) const = 0;
    virtual double df(double x) const = 0;
    virtual double d2f(double x) const = 0;
    /// Defaults to a central difference of d2f.
    virtual double d3f(double x) const;

    virtual double g(double x) const = 0;
    virtual double dg(double x) const = 0;
    virtual double d2g(double x) const = 0;
    /// Defaults to a central difference of d2g.
    virtual double d3g(double x) const;

    /// Infimum and supremum of g.
    virtual std::pair<double, double> g_limits() const = 0;
    /// Window expected to contain both extrema of f.
    virtual Interval search_window() const = 0;
    /// Fold abscissae when they are known in closed form.
    virtual std::optional<std::pair<double, double>> closed_form_folds() const {
        return std::nullopt;
    }
    /// Inflection point of f between the folds. Default: root of d2f.
    virtual double f_inflection() const;
    /// Inflection point (steepest point) of g. Default: root of d2g.
    virtual double g_inflection() const;
};

/// Sigmoid nullclines built from ReducedParams.
class SigmoidNullclines final : public Nullclines {
public:
    explicit SigmoidNullclines(const ReducedParams& rp) : rp_(rp) {}

    double f(double x) const override;
    double df(double x) const override;
    double d2f(double x) const override;
    double d3f(double x) const override;
    double g(double x) const override;
    double dg(double x) const override;
    double d2g(double x) const override;
    double d3g(double x) const override;
    std::pair<double, double> g_limits() const override { return {1.0 - rp_.d, 1.0 + rp_.d}; }
    Interval search_window() const override;
    std::optional<std::pair<double, double>> closed_form_folds() const override;
    double f_inflection() const override { return rp_.x_alpha; }
    double g_inflection() const override { return rp_.x_xi; }

    const ReducedParams& params() const { return rp_; }

private:
    ReducedParams rp_;
};

/// Nullclines from user-supplied callables.
class FunctionNullclines final : public Nullclines {
public:
    using Fn = std::function<double(double)>;

    struct Spec {
        Fn f, df, d2f;
        Fn g, dg, d2g;
        std::pair<double, double> g_limits;
        Interval window;
    };

    explicit FunctionNullclines(Spec spec) : s_(std::move(spec)) {}

    double f(double x) const override { return s_.f(x); }
    double df(double x) const override { return s_.df(x); }
    double d2f(double x) const override { return s_.d2f(x); }
    double g(double x) const override { return s_.g(x); }
    double dg(double x) const override { return s_.dg(x); }
    double d2g(double x) const override { return s_.d2g(x); }
    std::pair<double, double> g_limits() const override { return s_.g_limits; }
    Interval search_window() const override { return s_.window; }

private:
    Spec s_;
};

}  // namespace glacia
