#include <doctest.h>

#include <cmath>

#include "glacia/errors.hpp"
#include "glacia/sigmoid.hpp"
#include "oracles.hpp"

using namespace glacia;

namespace {
constexpr SigmoidFamily kAll[] = {SigmoidFamily::Tanh, SigmoidFamily::Logistic,
                                  SigmoidFamily::Algebraic, SigmoidFamily::Erf};
}

TEST_SUITE("sigmoid") {
    TEST_CASE("tanh at 1 matches the continued fraction") {
        CHECK(sigmoid(SigmoidFamily::Tanh, 1.0) == doctest::Approx(0.761594155955765).epsilon(1e-14));
        CHECK(sigmoid(SigmoidFamily::Tanh, 1.0) == doctest::Approx(oracle::tanh_cf(1.0)).epsilon(1e-14));
        CHECK(sigmoid(SigmoidFamily::Tanh, 0.0) == 0.0);
    }

    TEST_CASE("odd, bounded, nondecreasing on a dense grid") {
        for (auto fam : kAll) {
            CAPTURE(to_string(fam));
            CHECK(sigmoid(fam, 0.0) == 0.0);
            double prev = -2.0;
            for (int i = 0; i <= 1000; ++i) {
                const double u = -20.0 + 40.0 * i / 1000.0;
                const double v = sigmoid(fam, u);
                CHECK(v >= prev);
                CHECK(std::abs(v) <= 1.0);
                if (std::abs(u) <= 5.0) CHECK(std::abs(v) < 1.0);
                CHECK(sigmoid(fam, -u) == doctest::Approx(-v).epsilon(1e-15));
                prev = v;
            }
        }
    }

    TEST_CASE("analytic derivatives match central differences") {
        for (auto fam : kAll) {
            CAPTURE(to_string(fam));
            for (int i = 0; i < 100; ++i) {
                const double u = -4.0 + 8.0 * (i + 0.37) / 100.0;
                const double h = 1e-5;
                auto s0 = [&](double x) { return sigmoid(fam, x); };
                auto s1 = [&](double x) { return sigmoid_deriv(fam, x); };
                auto s2 = [&](double x) { return sigmoid_deriv2(fam, x); };
                CHECK(oracle::rel(sigmoid_deriv(fam, u), oracle::central(s0, u, h), 1e-3) < 1e-6);
                CHECK(oracle::rel(sigmoid_deriv2(fam, u), oracle::central(s1, u, h), 1e-3) < 1e-6);
                CHECK(oracle::rel(sigmoid_deriv3(fam, u), oracle::central(s2, u, h), 1e-3) < 1e-6);
            }
            CHECK(sigmoid_deriv(fam, 0.0) == doctest::Approx(sigmoid_max_deriv(fam)).epsilon(1e-15));
        }
    }

    TEST_CASE("inverse and derivative inverse") {
        for (auto fam : kAll) {
            CAPTURE(to_string(fam));
            for (double u : {-3.0, -0.7, 0.0, 0.2, 1.9}) {
                CHECK(sigmoid_inverse(fam, sigmoid(fam, u)) == doctest::Approx(u).epsilon(1e-9));
            }
            for (double frac : {0.05, 0.3, 0.5, 0.9, 1.0}) {
                const double slope = frac * sigmoid_max_deriv(fam);
                const double u = sigmoid_deriv_inverse(fam, slope);
                CHECK(u >= 0.0);
                CHECK(sigmoid_deriv(fam, u) == doctest::Approx(slope).epsilon(1e-10));
            }
            CHECK_THROWS_AS(sigmoid_inverse(fam, 1.0), RangeError);
            CHECK_THROWS_AS(sigmoid_deriv_inverse(fam, 1.01 * sigmoid_max_deriv(fam)), RangeError);
            CHECK_THROWS_AS(sigmoid_deriv_inverse(fam, 0.0), RangeError);
        }
        // artanh(sqrt(0.5))
        CHECK(sigmoid_deriv_inverse(SigmoidFamily::Tanh, 0.5) == doctest::Approx(0.881373587019543).epsilon(1e-13));
    }

    TEST_CASE("family names round-trip") {
        for (auto fam : kAll) CHECK(sigmoid_family_from_string(to_string(fam)) == fam);
        CHECK_THROWS_AS(sigmoid_family_from_string("cubic"), ConfigError);
    }
}
