#include "doctest.h"

#include <cmath>

#include "plperiod/asymptotics.hpp"
#include "plperiod/period.hpp"
#include "plperiod/quadrature.hpp"

using namespace plperiod;

TEST_CASE("small-energy coefficient at p = 2 is 2 pi / omega") {
    for (double omega : {0.5, 1.0, std::sqrt(2.0), 3.0}) {
        CHECK(small_e_coefficient(2.0, omega) * omega ==
              doctest::Approx(2.0 * M_PI).epsilon(1e-12));
    }
}

TEST_CASE("coefficient identity against the Beta integral") {
    // C(p, omega) * omega * p'^(1/p) / (2 sqrt(2)) = B(1/2, 1 - 1/p)
    //                                             = int_{-1}^{1} (1-y^2)^(-1/p) dy
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
        const double lhs = small_e_coefficient(p, 1.0) *
                           std::pow(conjugate(p), 1.0 / p) / (2.0 * std::sqrt(2.0));
        const auto quad = tanh_sinh(
            TsIntegrand([p](double, double da, double db) {
                return std::pow(da * db, -1.0 / p);
            }),
            -1.0, 1.0, 1e-12);
        CHECK(lhs == doctest::Approx(quad.value).epsilon(1e-10));
    }
}

TEST_CASE("fitted exponent and coefficient on the model family") {
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
        const PotentialSpec pot = make_model_potential(p, 2.0 * p);
        const AsymptoticFit fit = asymptotic_report(pot, 1e-8, 1e-7);
        CHECK(std::fabs(fit.exponent_fit - (0.5 - 1.0 / p)) <= 1e-3);
        CHECK(fit.rel_err <= 0.01);
    }
}

TEST_CASE("p in (1,2): the period diverges at small E with exponent 1/2 - 1/p") {
    const PotentialSpec pot = make_model_potential(1.5, 3.0);
    const AsymptoticFit fit = asymptotic_report(pot, 1e-8, 1e-7);
    CHECK(fit.exponent_theory == doctest::Approx(-1.0 / 6.0));
    CHECK(std::fabs(fit.exponent_fit - fit.exponent_theory) <= 1e-3);
    CHECK(fit.rel_err <= 0.01);
}

TEST_CASE("scaled-period limit at (3,6) recovers C(3, sqrt(3))") {
    const PotentialSpec pot = make_model_potential(3.0, 6.0);
    const double C = small_e_coefficient(3.0, std::sqrt(3.0));
    const double E = 1e-9;
    const double T = period_direct(pot, E, 1e-11).T;
    CHECK(T * std::pow(E, 1.0 / 3.0 - 0.5) == doctest::Approx(C).epsilon(1e-3));
}

TEST_CASE("blow-up probe: T increases strictly along E -> E*-") {
    const PotentialSpec pot = make_model_potential(3.0, 6.0);
    const std::vector<double> Ts = blowup_probe(pot, 2, 8);
    REQUIRE(Ts.size() == 7);
    for (std::size_t i = 1; i < Ts.size(); ++i) CHECK(Ts[i] > Ts[i - 1]);
}

TEST_CASE("degenerate fit window is rejected") {
    const PotentialSpec pot = make_model_potential(3.0, 6.0);
    CHECK_THROWS_AS(asymptotic_report(pot, 1e-8, 1e-8 * (1.0 + 1e-15)),
                    std::invalid_argument);
    CHECK_THROWS_AS(asymptotic_report(pot, 0.2, 0.3), std::invalid_argument);
}

TEST_CASE("coefficient domain errors") {
    CHECK_THROWS_AS(small_e_coefficient(1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(small_e_coefficient(3.0, 0.0), std::domain_error);
}
