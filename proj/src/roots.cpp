#include "glacia/roots.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <utility>

#include "glacia/errors.hpp"

namespace glacia {

double find_root(const std::function<double(double)>& f, double a, double b,
                 const RootOptions& opts) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!(std::isfinite(fa) && std::isfinite(fb)) || (fa > 0.0) == (fb > 0.0)) {
        throw RangeError("find_root: no sign change on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]");
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * eps * std::abs(b) + 0.5 * opts.x_tol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;

        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p;
            double q;
            const double s = fb / fa;
            if (a == c) {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) {
                q = -q;
            } else {
                p = -p;
            }
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    throw ConvergenceError("find_root: no convergence after " +
                           std::to_string(opts.max_iter) + " iterations");
}

std::vector<Bracket> sign_scan(const std::function<std::optional<double>(double)>& f,
                               double a, double b, int cells) {
    std::vector<Bracket> out;
    if (cells < 1 || !(b > a)) return out;
    const double h = (b - a) / cells;
    double x_prev = a;
    std::optional<double> v_prev = f(a);
    for (int i = 1; i <= cells; ++i) {
        const double x = (i == cells) ? b : a + h * i;
        const std::optional<double> v = f(x);
        if (v_prev && v && std::isfinite(*v_prev) && std::isfinite(*v)) {
            if (*v_prev == 0.0) {
                out.push_back({x_prev, x_prev});
            } else if ((*v_prev > 0.0) != (*v > 0.0) && *v != 0.0) {
                out.push_back({x_prev, x});
            }
        }
        x_prev = x;
        v_prev = v;
    }
    if (v_prev && *v_prev == 0.0) out.push_back({b, b});
    return out;
}

}  // namespace glacia
