#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace glacia {

struct RootOptions {
    double x_tol = 1e-12;  ///< absolute bracket width at termination
    int max_iter = 300;
};

/// Closed interval [lo, hi] known to contain a sign change.
struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
};

/// Brent's method (bisection / secant / inverse quadratic interpolation).
/// Requires f(a) and f(b) of opposite sign or one of them zero; throws
/// RangeError otherwise and ConvergenceError when max_iter is exhausted.
double find_root(const std::function<double(double)>& f, double a, double b,
                 const RootOptions& opts = {});

/// Splits [a, b] into `cells` equal cells and returns every cell whose end
/// values change sign. Points where `f` returns nullopt are treated as gaps:
/// a sign change is only reported between two adjacent defined samples.
std::vector<Bracket> sign_scan(const std::function<std::optional<double>(double)>& f,
                               double a, double b, int cells);

}  // namespace glacia
