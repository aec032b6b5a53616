#include "glacia/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace glacia {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece qk15(const std::function<double(double)>& fn, double a, double b) {
    // Outer nodes of a tiny piece can round onto an endpoint.
    const double lo = std::min(a, b), hi = std::max(a, b);
    auto f = [&](double x) {
        if (x <= lo) x = std::nextafter(lo, hi);
        if (x >= hi) x = std::nextafter(hi, lo);
        return fn(x);
    };
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> fv1{}, fv2{};
    for (int j = 0; j < 3; ++j) {
        const int jtw = 2 * j + 1;
        const double dx = half * kXgk[jtw];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += kWg[j] * (f1 + f2);
        resk += kWgk[jtw] * (f1 + f2);
        resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
    }
    for (int j = 0; j < 4; ++j) {
        const int jtwm1 = 2 * j;
        const double dx = half * kXgk[jtwm1];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += kWgk[jtwm1] * (f1 + f2);
        resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    }
    const double ahalf = std::abs(half);
    resabs *= ahalf;
    resasc *= ahalf;
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * resabs, err);
    }
    return {a, b, resk * half, err};
}

}  // namespace

QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                const QuadratureOptions& opts) {
    QuadratureResult r;
    if (a == b) {
        r.converged = true;
        return r;
    }
    std::priority_queue<Piece> heap;
    heap.push(qk15(f, a, b));
    r.evaluations = 15;
    double total = heap.top().value;
    double error = heap.top().error;
    while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
           r.subdivisions < opts.max_subdivisions) {
        const Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Piece left = qk15(f, worst.a, mid);
        const Piece right = qk15(f, mid, worst.b);
        r.evaluations += 30;
        ++r.subdivisions;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the rounding accumulated by the running updates.
    total = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    r.value = total;
    r.abs_error = error;
    r.converged = error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    return r;
}

}  // namespace glacia
