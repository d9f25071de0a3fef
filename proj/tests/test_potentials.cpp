#include "doctest.h"

#include <cmath>
#include <random>

#include "plperiod/potential.hpp"

using namespace plperiod;

namespace {

// Independent oracle: plain bisection on V(w) - E, no shared code with
// the library root finder.
double bisect_root(const PotentialSpec& pot, double lo, double hi, double E) {
    double flo = pot.V(lo) - E;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = pot.V(mid) - E;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Double-well deformation: second interior minimum between A and B, so
// (w - A) V'(w) > 0 fails on a subinterval while the well shape survives.
PotentialSpec make_double_well() {
    PotentialSpec pot;
    pot.p = 2.0;
    pot.V = [](double w) { return (w - 1.0) * (w - 1.0) * ((w - 2.0) * (w - 2.0) + 0.05); };
    pot.dV = [](double w) {
        return 2.0 * (w - 1.0) * ((w - 2.0) * (w - 2.0) + 0.05) +
               2.0 * (w - 1.0) * (w - 1.0) * (w - 2.0);
    };
    pot.d2V = [](double w) {
        return 2.0 * ((w - 2.0) * (w - 2.0) + 0.05) + 8.0 * (w - 1.0) * (w - 2.0) +
               2.0 * (w - 1.0) * (w - 1.0);
    };
    pot.A = 1.0;
    pot.Estar = 4.05;  // V(0)
    // B solves V(B) = V(0) right of the second bump
    pot.B = 2.9809;
    {
        // refine B with a few bisection steps so V(B) = E* holds tightly
        double lo = 2.5, hi = 3.5;
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (pot.V(mid) < pot.Estar)
                lo = mid;
            else
                hi = mid;
        }
        pot.B = 0.5 * (lo + hi);
    }
    pot.omega = std::sqrt(pot.d2V(1.0));
    pot.name = "double-well";
    return pot;
}

} // namespace

TEST_CASE("phi basics") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const double s = U(rng);
        CHECK(phi(2.0, s) == doctest::Approx(s).epsilon(1e-15));
    }
    CHECK(phi(3.0, -2.0) == doctest::Approx(-4.0));
    CHECK(phi(3.0, 0.0) == 0.0);
    CHECK(phi(1.5, 0.0) == 0.0);

    // odd and strictly increasing
    CHECK(phi(2.7, -1.3) == doctest::Approx(-phi(2.7, 1.3)));
    CHECK(phi(2.7, 1.2) < phi(2.7, 1.3));
}

TEST_CASE("phi round-trip: phi_{p'}(phi_p(s)) = s") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logmag(-6.0, 6.0);
    for (double p : {1.5, 2.0, 2.5, 3.0, 4.0}) {
        const double pp = conjugate(p);
        CHECK(1.0 / p + 1.0 / pp == doctest::Approx(1.0).epsilon(1e-16));
        for (int i = 0; i < 40; ++i) {
            const double s = std::copysign(std::pow(10.0, logmag(rng)), logmag(rng));
            CHECK(phi(pp, phi(p, s)) == doctest::Approx(s).epsilon(1e-12));
        }
    }
}

TEST_CASE("admissible parameter region is the open rectangle") {
    CHECK(admissible(1.0 / 3.0, 1.5));
    CHECK(admissible(0.49, 1.01));
    CHECK(!admissible(0.5, 1.5));   // a = 1/2 excluded (p = 2)
    CHECK(!admissible(0.3, 2.0));   // m = 2 excluded (q = 2p)
    CHECK(!admissible(0.3, 1.0));
    CHECK(!admissible(0.0, 1.5));
}

TEST_CASE("model potential critical data") {
    const PotentialSpec pot = make_model_potential(3.0, 6.0);
    CHECK(pot.Estar == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(pot.omega == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(pot.A == 1.0);
    // B is the second root of V = E*; its y = w^p image is gamma_m.
    CHECK(pot.V(pot.B) == doctest::Approx(pot.Estar).epsilon(1e-14));
    CHECK(std::pow(pot.B, 3.0) == doctest::Approx(pot.exps->gamma_m()).epsilon(1e-14));
    CHECK(pot.exps->gamma_m() == doctest::Approx(2.0).epsilon(1e-15));

    CHECK(pot.V(1.0) == 0.0);
    CHECK(pot.dV(1.0) == 0.0);
    CHECK(pot.V(0.0) == doctest::Approx(pot.Estar));
    CHECK(pot.d2V(pot.A) == doctest::Approx(pot.omega * pot.omega).epsilon(1e-14));

    CHECK_THROWS_AS(make_model_potential(3.0, 3.0), std::domain_error);
    CHECK_THROWS_AS(make_model_potential(3.0, 2.0), std::domain_error);
}

TEST_CASE("model potential matches direct power evaluation away from w = 1") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(0.05, 1.25);
    for (auto [p, q] : {std::pair{2.0, 4.0}, {3.0, 6.0}, {2.5, 7.0}}) {
        const PotentialSpec pot = make_model_potential(p, q);
        int tested = 0;
        while (tested < 150) {
            const double w = U(rng);
            if (std::fabs(w - 1.0) < 0.15) continue;  // direct form cancels there
            ++tested;
            const double direct =
                std::pow(w, q) / q - std::pow(w, p) / p + 1.0 / p - 1.0 / q;
            CHECK(pot.V(w) == doctest::Approx(direct).epsilon(1e-12));
            const double ddirect = std::pow(w, q - 1.0) - std::pow(w, p - 1.0);
            CHECK(pot.dV(w) == doctest::Approx(ddirect).epsilon(1e-11));
        }
    }
}

TEST_CASE("model V' = phi_q - phi_p including negative arguments") {
    const PotentialSpec pot = make_model_potential(2.5, 4.0);
    for (double w : {-1.3, -0.7, 0.4, 1.2}) {
        CHECK(pot.dV(w) == doctest::Approx(phi(4.0, w) - phi(2.5, w)).epsilon(1e-13));
    }
}

TEST_CASE("model potential near w = 1: series keeps relative accuracy") {
    const PotentialSpec pot = make_model_potential(3.0, 6.0);
    // V(1 + s) ~ (omega^2/2) s^2 with omega^2 = 3
    for (double s : {1e-4, -1e-4, 1e-6, -1e-6, 1e-8}) {
        const double v = pot.V(1.0 + s);
        CHECK(v == doctest::Approx(1.5 * s * s).epsilon(1e-3));
        CHECK(v > 0.0);
    }
}

TEST_CASE("cross-module identity q V(y^(1/p)) = W(y) on [0, gamma_m]") {
    for (auto [p, q] : {std::pair{3.0, 6.0}, {3.0, 5.0}, {4.0, 9.0}, {2.0, 4.0}}) {
        const PotentialSpec pot = make_model_potential(p, q);
        const double m = q / p;
        const double gm = pot.exps->gamma_m();
        for (int i = 0; i <= 400; ++i) {
            const double y = gm * i / 400.0;
            const double lhs = q * pot.V(std::pow(y, 1.0 / p));
            CHECK(std::fabs(lhs - W_of(m, y)) <= 1e-12);
        }
    }
}

TEST_CASE("W values at the marked points") {
    for (double m : {1.2, 1.5, 2.0, 3.0}) {
        const double gm = std::pow(m, 1.0 / (m - 1.0));
        CHECK(W_of(m, 1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(W_of(m, 0.0) == doctest::Approx(m - 1.0).epsilon(1e-12));
        CHECK(W_of(m, gm) == doctest::Approx(m - 1.0).epsilon(1e-12));
    }
}

TEST_CASE("turning points: closed form at m = 2") {
    // q = 2p: y = w^p solves (y-1)^2 = qE, so w_i = (1 -+ sqrt(qE))^(1/p)
    const PotentialSpec pot = make_model_potential(3.0, 6.0);
    const double E = 1.0 / 24.0;
    const EnergyGeometry geo = turning_points(pot, E);
    CHECK(geo.w1 == doctest::Approx(std::pow(2.0, -1.0 / 3.0)).epsilon(1e-12));
    CHECK(geo.w2 == doctest::Approx(std::pow(1.5, 1.0 / 3.0)).epsilon(1e-12));

    // independent bisection oracle
    CHECK(geo.w1 == doctest::Approx(bisect_root(pot, 0.0, 1.0, E)).epsilon(1e-12));
    CHECK(geo.w2 == doctest::Approx(bisect_root(pot, 1.0, pot.B, E)).epsilon(1e-12));
}

TEST_CASE("turning points: quadratic-well limit as E -> 0+") {
    const PotentialSpec pot = make_model_potential(3.0, 6.0);
    const double E = 1e-6;
    const EnergyGeometry geo = turning_points(pot, E);
    const double width = 2.0 * std::sqrt(2.0 * E) / pot.omega;
    CHECK(geo.w2 - geo.w1 == doctest::Approx(width).epsilon(1e-2));
    CHECK(geo.w1 < 1.0);
    CHECK(geo.w2 > 1.0);
}

TEST_CASE("turning points: homoclinic boundary E -> E*-") {
    const PotentialSpec pot = make_model_potential(3.0, 6.0);
    const EnergyGeometry geo = turning_points(pot, pot.Estar * (1.0 - 1e-10));
    CHECK(geo.w1 < 5e-3);
    CHECK(std::fabs(geo.w2 - pot.B) < 5e-3);
}

TEST_CASE("turning points: V(w_i(E)) = E for random E") {
    std::mt19937_64 rng(17);
    for (auto [p, q] : {std::pair{3.0, 6.0}, {2.0, 4.0}, {3.5, 5.0}}) {
        const PotentialSpec pot = make_model_potential(p, q);
        std::uniform_real_distribution<double> UE(1e-4 * pot.Estar, 0.9999 * pot.Estar);
        for (int i = 0; i < 100; ++i) {
            const double E = UE(rng);
            const EnergyGeometry geo = turning_points(pot, E);
            CHECK(std::fabs(pot.V(geo.w1) - E) <= 1e-12 * pot.Estar);
            CHECK(std::fabs(pot.V(geo.w2) - E) <= 1e-12 * pot.Estar);
            CHECK(geo.w1 > 0.0);
            CHECK(geo.w1 < pot.A);
            CHECK(geo.w2 > pot.A);
            CHECK(geo.w2 < pot.B);
        }
    }
}

TEST_CASE("turning points: domain errors") {
    const PotentialSpec pot = make_model_potential(3.0, 6.0);
    CHECK_THROWS_AS(turning_points(pot, 0.0), std::domain_error);
    CHECK_THROWS_AS(turning_points(pot, pot.Estar), std::domain_error);
    CHECK_THROWS_AS(turning_points(pot, -0.1), std::domain_error);
}

TEST_CASE("exponent plumbing error paths") {
    Exponents e{3.0, std::nullopt};
    CHECK_THROWS_AS(e.m(), std::logic_error);
    CHECK_THROWS_AS(make_harmonic_potential(0.0), std::domain_error);
    CHECK_THROWS_AS(check_hypotheses(make_model_potential(3.0, 6.0), 8),
                    std::invalid_argument);
}

TEST_CASE("gamma_of sign structure") {
    const PotentialSpec pot = make_model_potential(3.0, 6.0);
    const double E = 0.05;
    const EnergyGeometry geo = turning_points(pot, E);
    CHECK(gamma_of(pot, 0.5 * (geo.w1 + geo.w2), E) > 0.0);
    CHECK(std::fabs(gamma_of(pot, geo.w1, E)) < 1e-12);
    CHECK(gamma_of(pot, 0.99 * geo.w1, E) < 0.0);
}

TEST_CASE("hypotheses hold for the model family") {
    for (auto [p, q] : {std::pair{3.0, 6.0}, {2.5, 4.0}, {4.0, 12.0}}) {
        const PotentialSpec pot = make_model_potential(p, q);
        const HypothesisReport rep = check_hypotheses(pot, 256);
        CHECK(rep.h1.verdict == Verdict::holds);
        CHECK(rep.h2.verdict == Verdict::holds);
        CHECK(rep.h3.verdict == Verdict::holds);
        // |V'(w)|/w^(p-1) = 1 - w^(q-p) -> 1
        CHECK(rep.h2_lower_bound == doctest::Approx(1.0).epsilon(1e-3));
    }
    // refinement toward 0 only sharpens the estimate
    const PotentialSpec pot = make_model_potential(3.0, 6.0);
    const double lb_coarse = check_hypotheses(pot, 64).h2_lower_bound;
    const double lb_fine = check_hypotheses(pot, 1024).h2_lower_bound;
    CHECK(lb_fine == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(lb_coarse == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("hypotheses for the parabola oracle") {
    const PotentialSpec pot = make_harmonic_potential(std::sqrt(2.0));
    CHECK(pot.Estar == doctest::Approx(1.0));
    const HypothesisReport rep = check_hypotheses(pot, 256);
    CHECK(rep.h1.verdict == Verdict::holds);
    CHECK(rep.h3.verdict == Verdict::holds);
}

TEST_CASE("H3 fails with a witness in (A, B) for a second interior minimum") {
    const PotentialSpec pot = make_double_well();
    const HypothesisReport rep = check_hypotheses(pot, 512);
    CHECK(rep.h1.verdict == Verdict::holds);
    CHECK(rep.h3.verdict == Verdict::fails);
    CHECK(rep.h3.witness > pot.A);
    CHECK(rep.h3.witness < pot.B);

    // At E = 0.06 the line V = E has three crossings in (A, B). Refinement
    // must either refuse or land on the innermost one (a valid orbit).
    try {
        const EnergyGeometry geo = turning_points(pot, 0.06);
        for (int i = 1; i <= 20; ++i) {
            const double w = pot.A + (geo.w2 - pot.A) * i / 21.0;
            CHECK(pot.V(w) < 0.06);
        }
    } catch (const HypothesisError&) {
        CHECK(true);
    }
}
