#include <doctest.h>

#include <cmath>
#include <random>

#include "glacia/errors.hpp"
#include "glacia/experiments.hpp"
#include "fixtures.hpp"

using namespace glacia;

TEST_SUITE("experiments") {
    TEST_CASE("two-point sweep without measurement") {
        SweepSpec s;
        s.nu_min = 10.0;
        s.nu_max = 1000.0;
        s.points = 2;
        s.measure = false;
        const ReducedParams rp = fixture::calibrated().reduced();
        const SweepResult r = run_sweep(s, rp);
        REQUIRE(r.rows.size() == 2);
        for (const auto& row : r.rows) {
            CHECK_FALSE(row.period_measured.has_value());
            CHECK(row.period_asymptotic > row.period_leading);
            CHECK(row.t_minus <= row.period_leading);
            CHECK(row.period_leading <= row.t_plus);
        }
        const CsvTable t = sweep_table(r);
        CHECK(t.rows.size() == 2);
        CHECK_FALSE(t.rows[0][t.column("period_measured")].has_value());
    }

    TEST_CASE("measured sweep stays in grid order and inside the bounds") {
        SweepSpec s;
        s.nu_min = 1e2;
        s.nu_max = 1e4;
        s.points = 3;
        const ReducedParams rp = fixture::calibrated().reduced();
        const SweepResult r = run_sweep(s, rp, {}, {}, 3);
        REQUIRE(r.rows.size() == 3);
        CHECK(r.rows[0].nu == 1e2);
        CHECK(r.rows[1].nu == doctest::Approx(1e3));
        CHECK(r.rows[2].nu == 1e4);
        for (const auto& row : r.rows) {
            REQUIRE(row.period_measured.has_value());
            CHECK(row.error.empty());
            if (row.nu >= 1e3) {
                CHECK(*row.period_measured >= row.t_minus * 0.99);
                CHECK(*row.period_measured <= row.t_plus * 1.01);
            }
        }
        const PeriodExpansion pe = period_asymptotic(rp);
        const PowerLawFit fit = fit_power_law(r, pe.correction_coeff, 1e-5);
        CHECK(fit.points_used == 3);
        CHECK(fit.slope == doctest::Approx(-2.0 / 3.0).epsilon(0.075));
        CHECK(fit.prefactor_ratio == doctest::Approx(1.0).epsilon(0.2));

        const SweepResult serial = run_sweep(s, rp, {}, {}, 1);
        for (std::size_t i = 0; i < 3; ++i) CHECK(*serial.rows[i].period_measured == *r.rows[i].period_measured);
    }

    TEST_CASE("sweep below the critical nu") {
        SweepSpec s;
        s.nu_min = 0.01;
        s.nu_max = 1.0;
        s.points = 2;
        const SweepResult r = run_sweep(s, fixture::calibrated().reduced());
        CHECK_FALSE(r.warnings.empty());
        CHECK_FALSE(r.rows[0].error.empty());
        CHECK_FALSE(r.rows[0].period_measured.has_value());
        CHECK(r.rows[1].period_measured.has_value());
    }

    TEST_CASE("power-law fit needs two usable rows") {
        SweepResult r;
        r.rows.resize(1);
        CHECK_THROWS_AS(fit_power_law(r, 1.0, 0.0), AssumptionError);
    }

    TEST_CASE("time series") {
        const Config& cfg = fixture::calibrated();
        const ReducedParams rp = cfg.reduced();
        const CsvTable one = run_timeseries(rp, 0.0, 100, false, cfg.scales, cfg.xi_sum());
        CHECK(one.rows.size() == 1);

        const double period = 3.95653;
        const CsvTable ts = run_timeseries(rp, 3.0 * period, 3000, false, cfg.scales, cfg.xi_sum());
        REQUIRE(ts.rows.size() == 3001);
        CHECK(ts.header == std::vector<std::string>{"t", "x", "y"});
        // Fraction of the time y spends rising: a sawtooth rises slowly.
        int rising = 0;
        for (std::size_t i = 1; i < ts.rows.size(); ++i) rising += *ts.rows[i][2] > *ts.rows[i - 1][2];
        CHECK(rising / 3000.0 > 0.6);

        const CsvTable dim = run_timeseries(rp, period, 10, true, cfg.scales, cfg.xi_sum());
        CHECK(dim.header == std::vector<std::string>{"t_years", "T_kelvin", "L_meters"});
        const double t_end = *dim.rows.back()[0];
        CHECK(t_end == doctest::Approx(reduced_time_to_years(period, cfg.xi_sum(), cfg.scales)));
        const CsvTable nd = run_timeseries(rp, period, 10, false, cfg.scales, cfg.xi_sum());
        for (std::size_t i = 0; i < nd.rows.size(); ++i) {
            CHECK(*dim.rows[i][1] == doctest::Approx(temperature_kelvin(*nd.rows[i][1], cfg.scales)));
            const double lambda = *nd.rows[i][2] * cfg.xi_sum() / 8.0;
            CHECK(*dim.rows[i][2] == doctest::Approx(extent_meters(lambda, cfg.scales)));
        }

        const CsvTable full = run_timeseries(cfg.full, {1.39, 0.07}, 1.0, 20, false, cfg.scales);
        CHECK(full.header == std::vector<std::string>{"tau", "theta", "lambda"});
        CHECK(full.rows.size() == 21);
    }

    TEST_CASE("random generators are reproducible") {
        const ReducedParams base = fixture::calibrated().reduced();
        std::mt19937_64 a(5), b(5);
        for (int i = 0; i < 5; ++i) {
            const ReducedParams x = random_admissible_reduced(a, base);
            const ReducedParams y = random_admissible_reduced(b, base);
            CHECK(x.a == y.a);
            CHECK(x.delta_alpha == y.delta_alpha);
            CHECK(check_assumptions(x).all());
        }
    }

    TEST_CASE("perturbations follow the eigenvalues") {
        std::mt19937_64 rng(3);
        int conv = 0, div = 0;
        for (int i = 0; i < 10; ++i) {
            const auto rc = random_full_with_critical_points(rng, fixture::table1().full);
            for (const auto& pt : rc.points) {
                const PerturbationOutcome o = perturbation_outcome(rc.params, pt);
                CHECK(o == (is_stable(pt.classification) ? PerturbationOutcome::Converged
                                                         : PerturbationOutcome::Diverged));
                (o == PerturbationOutcome::Converged ? conv : div)++;
            }
        }
        CHECK(conv > 0);
        CHECK(div > 0);
    }

    TEST_CASE("worker count resolution") {
        CHECK(resolve_workers(4) == 4);
        CHECK(resolve_workers(0) >= 1);
    }
}
