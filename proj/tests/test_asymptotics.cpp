#include <doctest.h>

#include <cmath>
#include <random>

#include "glacia/asymptotics.hpp"
#include "glacia/dynamics.hpp"
#include "glacia/errors.hpp"
#include "glacia/experiments.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "vdp.hpp"

using namespace glacia;

namespace {

// Slow-branch time in x: the substitution w = f(x) turns the w-integral into
// a regular one between a landing point and a fold.
double slow_time_x(const Nullclines& nc, double from, double to) {
    auto integrand = [&](double x) {
        return nc.df(x) / (std::sqrt(nc.f(x)) * (nc.g(x) - nc.f(x)));
    };
    return oracle::simpson(integrand, from, to, 20000);
}

FunctionNullclines constant_g(double K) {
    auto nc = fixture::van_der_pol();
    FunctionNullclines::Spec s;
    s.f = [](double x) { return 2.0 + 0.5 * (3.0 * x - x * x * x); };
    s.df = [](double x) { return 1.5 * (1.0 - x * x); };
    s.d2f = [](double x) { return -3.0 * x; };
    s.g = [K](double) { return K; };
    s.dg = [](double) { return 0.0; };
    s.d2g = [](double) { return 0.0; };
    s.g_limits = {K, K};
    s.window = {-5.0, 5.0};
    return FunctionNullclines(s);
}

FunctionNullclines shifted_vdp(double s_amp) {
    FunctionNullclines::Spec s;
    s.f = [](double x) { return 2.0 + 0.5 * (3.0 * x - x * x * x); };
    s.df = [](double x) { return 1.5 * (1.0 - x * x); };
    s.d2f = [](double x) { return -3.0 * x; };
    s.g = [s_amp](double x) { return 2.0 + s_amp * std::tanh(x / 0.3); };
    s.dg = [s_amp](double x) { const double c = 1 / std::cosh(x / 0.3); return s_amp * c * c / 0.3; };
    s.d2g = [s_amp](double x) {
        const double c = 1 / std::cosh(x / 0.3);
        return -2.0 * s_amp * c * c * std::tanh(x / 0.3) / 0.09;
    };
    s.g_limits = {2.0 - s_amp, 2.0 + s_amp};
    s.window = {-5.0, 5.0};
    return FunctionNullclines(s);
}

}  // namespace

TEST_SUITE("asymptotics") {
    TEST_CASE("slow-branch integrals against an x-space oracle") {
        const ReducedParams rp = fixture::calibrated().reduced();
        const SigmoidNullclines nc(rp);
        const FoldData fd = find_folds(nc);
        const double Ip = quad_I(nc, fd, StableBranch::Plus, fd.f_at_minus, fd.f_at_plus);
        const double Im = quad_I(nc, fd, StableBranch::Minus, fd.f_at_plus, fd.f_at_minus);
        CHECK(Ip == doctest::Approx(slow_time_x(nc, fd.x_tilde_minus, fd.x_plus)).epsilon(1e-8));
        CHECK(Im == doctest::Approx(slow_time_x(nc, fd.x_tilde_plus, fd.x_minus)).epsilon(1e-8));
        CHECK(quad_I(nc, fd, StableBranch::Plus, 1.0, 1.0) == 0.0);

        const PeriodExpansion pe = period_asymptotic(rp);
        CHECK(pe.leading == doctest::Approx(Ip + Im).epsilon(1e-12));
        CHECK(pe.time_plus_branch == doctest::Approx(Ip).epsilon(1e-12));
        CHECK(pe.leading == doctest::Approx(3.5994137812).epsilon(1e-9));
    }

    TEST_CASE("tolerance refinement does not move the integrals") {
        const ReducedParams rp = fixture::calibrated().reduced();
        const SigmoidNullclines nc(rp);
        const FoldData fd = find_folds(nc);
        const double loose = quad_I(nc, fd, StableBranch::Plus, fd.f_at_minus, fd.f_at_plus, {1e-9, 1e-7, 500});
        const double tight = quad_I(nc, fd, StableBranch::Plus, fd.f_at_minus, fd.f_at_plus, {1e-15, 1e-13, 2000});
        CHECK(std::abs(loose - tight) <= 1e-7 * tight);
    }

    TEST_CASE("frozen g gives the closed form") {
        const auto nc = constant_g(5.0);
        const FoldData fd = find_folds(nc);
        CHECK(quad_I(nc, fd, StableBranch::Plus, 1.2, 2.7) == doctest::Approx(phi(2.7, 1.2, 5.0)).epsilon(1e-10));
        const auto low = constant_g(0.5);
        CHECK(quad_I(low, find_folds(low), StableBranch::Minus, 2.7, 1.2) ==
              doctest::Approx(phi(1.2, 2.7, 0.5)).epsilon(1e-10));
        CHECK(phi(1.3, 1.3, 2.0) == 0.0);
        auto integrand = [](double w) { return 1.0 / (std::sqrt(w) * (4.0 - w)); };
        CHECK(phi(3.0, 0.5, 4.0) == doctest::Approx(oracle::simpson(integrand, 0.5, 3.0, 20000)).epsilon(1e-10));
        CHECK_THROWS_AS(phi(1.0, 3.0, 2.0), DomainError);
        CHECK_THROWS_AS(phi(-1.0, 0.5, 2.0), DomainError);
    }

    TEST_CASE("integrand singular where g meets the branch") {
        const auto nc = constant_g(2.0);
        CHECK_THROWS_AS(quad_I(nc, find_folds(nc), StableBranch::Plus, 1.0, 3.0), SingularIntegrandError);
    }

    TEST_CASE("branch integral between its frozen-g bounds") {
        const ReducedParams rp = fixture::calibrated().reduced();
        const SigmoidNullclines nc(rp);
        const FoldData fd = find_folds(nc);
        const double u = fd.f_at_minus, v = fd.f_at_plus;
        const double Ip = quad_I(nc, fd, StableBranch::Plus, u, v);
        CHECK(phi(v, u, 1.0 + rp.d) < Ip);
        CHECK(Ip < phi(v, u, nc.g(fd.x_plus)));
        const double Im = quad_I(nc, fd, StableBranch::Minus, v, u);
        CHECK(phi(u, v, 1.0 - rp.d) < Im);
        CHECK(Im < phi(u, v, nc.g(fd.x_minus)));
    }

    TEST_CASE("period bounds") {
        const Config& cfg = fixture::calibrated();
        const ReducedParams rp = cfg.reduced();
        const PeriodBounds pb = period_bounds(rp);
        const PeriodExpansion pe = period_asymptotic(rp);
        CHECK(pb.T_minus <= pe.leading);
        CHECK(pe.leading <= pb.T_plus);
        CHECK(pb.T_minus == doctest::Approx(3.55947).epsilon(1e-5));
        CHECK(pb.T_plus == doctest::Approx(3.74218).epsilon(1e-5));
        const double yr_minus = reduced_time_to_years(pb.T_minus, cfg.xi_sum(), cfg.scales);
        const double yr_plus = reduced_time_to_years(pb.T_plus, cfg.xi_sum(), cfg.scales);
        CHECK(yr_minus == doctest::Approx(108.0e3).epsilon(5e-3));
        CHECK(yr_plus == doctest::Approx(113.6e3).epsilon(5e-3));

        std::mt19937_64 rng(20240607);
        for (int i = 0; i < 50; ++i) {
            const ReducedParams r = random_admissible_reduced(rng, rp);
            const PeriodBounds b = period_bounds(r);
            const double lead = period_asymptotic(r).leading;
            CHECK(b.T_minus <= lead);
            CHECK(lead <= b.T_plus);
        }
    }

    TEST_CASE("upper bound diverges as g(x+) approaches f(x+)") {
        // f(x+) = 3 and g(1) = 2 + s tanh(1 / 0.3), so g(x+) -> f(x+) as s -> 0.99751^-1.
        // The frozen-g integral grows like log(1 / (g(x+) - f(x+))).
        const double s_star = 1.0 / std::tanh(1.0 / 0.3);
        double prev = 0.0;
        for (int k = 1; k <= 6; ++k) {
            const double gap = std::pow(10.0, -k);
            const auto nc = shifted_vdp(s_star * (1.0 + gap));
            const double tp = period_bounds(nc).T_plus;
            // Closer in, g recrosses f next to the fold, so only the bound is defined.
            if (k == 1) CHECK(period_asymptotic(nc).leading <= tp);
            if (k > 1) CHECK(tp - prev > 0.3);
            prev = tp;
        }
    }

    TEST_CASE("expansion structure") {
        const ReducedParams rp = fixture::calibrated().reduced();
        const PeriodExpansion pe = period_asymptotic(rp);
        CHECK(pe.correction_coeff > 0.0);
        CHECK(pe.correction_coeff == doctest::Approx(1.7603627).epsilon(1e-6));
        CHECK(pe.total(100.0) > pe.leading);
        CHECK(std::abs(pe.total(1e12) - pe.leading) < 1e-7);
        CHECK(std::abs(oracle::airy_ai_negative(-pe.airy_zeta)) <= 1e-6);
        CHECK(oracle::airy_ai_negative(-2.2) * oracle::airy_ai_negative(-2.5) < 0.0);

        std::mt19937_64 rng(11);
        for (int i = 0; i < 20; ++i) CHECK(period_asymptotic(random_admissible_reduced(rng, rp)).correction_coeff > 0.0);
    }

    TEST_CASE("amplitudes") {
        const ReducedParams rp = fixture::calibrated().reduced();
        const FoldData fd = find_folds(rp);
        const AmplitudeExpansion ae = amplitude_asymptotic(rp);
        CHECK(ae.ay_leading == doctest::Approx(fd.f_at_plus - fd.f_at_minus).epsilon(1e-14));
        CHECK(ae.ax_leading == doctest::Approx(fd.x_tilde_minus - fd.x_tilde_plus).epsilon(1e-14));
        CHECK(ae.ax_leading == doctest::Approx(branch_inverse(fd.f_at_minus, StableBranch::Plus, rp) -
                                               branch_inverse(fd.f_at_plus, StableBranch::Minus, rp)).epsilon(1e-12));
        CHECK(ae.ax_leading == doctest::Approx(0.239636).epsilon(1e-5));
        const double bound = amplitude_bound(rp);
        CHECK(bound == doctest::Approx(2.0 * rp.c + rp.b * (fd.f_at_plus - fd.f_at_minus)).epsilon(1e-14));
        CHECK(ae.ax_leading <= bound);
    }

    TEST_CASE("measurements against the expansion") {
        ReducedParams rp = fixture::calibrated().reduced();
        const PeriodExpansion pe = period_asymptotic(rp);
        const AmplitudeExpansion ae = amplitude_asymptotic(rp);
        rp.nu = 100.0;
        const auto m100 = measure_limit_cycle(rp);
        CHECK(std::abs(m100.period - pe.total(100.0)) / m100.period <= 0.05);
        rp.nu = 1000.0;
        const auto m1000 = measure_limit_cycle(rp);
        CHECK(m1000.amplitude_y == doctest::Approx(ae.ay_leading).epsilon(0.02));
        CHECK(m1000.amplitude_x <= amplitude_bound(rp));
        CHECK(m1000.period > pe.leading);
    }

    TEST_CASE("generic nullclines") {
        const auto nc = fixture::van_der_pol();
        const FoldData fd = find_folds(nc);
        const PeriodExpansion pe = period_asymptotic(nc);
        const double oracle_leading = slow_time_x(nc, 2.0, 1.0) + slow_time_x(nc, -2.0, -1.0);
        CHECK(pe.leading == doctest::Approx(oracle_leading).epsilon(1e-8));
        CHECK(pe.correction_coeff > 0.0);
        const PeriodBounds pb = period_bounds(nc);
        CHECK(pb.T_minus <= pe.leading);
        CHECK(pe.leading <= pb.T_plus);
        const AmplitudeExpansion ae = amplitude_asymptotic(nc);
        CHECK(ae.ax_leading == doctest::Approx(4.0).epsilon(1e-10));
        CHECK(ae.ay_leading == doctest::Approx(2.0).epsilon(1e-10));

        const auto m = measure_limit_cycle(nc, 1e3);
        CHECK(std::abs(m.period - pe.total(1e3)) / m.period <= 0.02);
        (void)fd;
    }

    TEST_CASE("assumption failures are reported") {
        const auto nc = constant_g(2.0);
        CHECK_THROWS_AS(period_asymptotic(nc), AssumptionError);
    }
}
