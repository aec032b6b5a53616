#pragma once

#include <functional>

namespace glacia {

struct QuadratureOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-10;
    int max_subdivisions = 500;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    int subdivisions = 0;
    bool converged = false;
};

/// Globally adaptive 7-point Gauss / 15-point Kronrod quadrature of f over
/// [a, b]. The interval with the largest error estimate is bisected until the
/// total error is below max(abs_tol, rel_tol |value|) or max_subdivisions is
/// reached. The nodes are interior, so f is never evaluated at a or b.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                const QuadratureOptions& opts = {});

}  // namespace glacia
