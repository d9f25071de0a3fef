#include "doctest.h"

#include <cmath>

#include "plperiod/quadrature.hpp"

using namespace plperiod;

TEST_CASE("tanh-sinh on smooth integrands") {
    auto r = tanh_sinh([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12);
    CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));

    r = tanh_sinh([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("tanh-sinh absorbs algebraic endpoint singularities") {
    // int_0^1 x^(-1/2) dx = 2; the endpoint is 0, so plain abscissas stay exact
    auto r = tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));

    // int_0^1 (1-x)^(-2/3) dx = 3; here 1 - x must come from the distance
    // argument or the mass within eps of the endpoint is lost
    r = tanh_sinh(TsIntegrand([](double, double, double db) {
                      return std::pow(db, -2.0 / 3.0);
                  }),
                  0.0, 1.0, 1e-12);
    CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));

    // Beta integral: int_{-1}^{1} (1-y^2)^(-1/p) dy = B(1/2, 1 - 1/p).
    // 1 - y^2 = dist_a * dist_b keeps the singular factor exact at both ends.
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
        const double exact = std::tgamma(0.5) * std::tgamma(1.0 - 1.0 / p) /
                             std::tgamma(1.5 - 1.0 / p);
        r = tanh_sinh(
            TsIntegrand([p](double, double da, double db) {
                return std::pow(da * db, -1.0 / p);
            }),
            -1.0, 1.0, 1e-12);
        CHECK(r.value == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    const QuadRule rule = gauss_legendre(6);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
        s += rule.w[i] * std::pow(rule.x[i], 10);
    CHECK(s == doctest::Approx(2.0 / 11.0).epsilon(1e-14));

    // weights sum to the measure of [-1, 1]
    double wsum = 0.0;
    for (double w : rule.w) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Jacobi with alpha = beta = -1/2 is Gauss-Chebyshev") {
    const int n = 9;
    const QuadRule rule = gauss_jacobi(n, -0.5, -0.5);
    for (int i = 0; i < n; ++i) {
        CHECK(rule.w[i] == doctest::Approx(M_PI / n).epsilon(1e-13));
        const double exact = std::cos(M_PI * (n - i - 0.5) / n);
        CHECK(rule.x[i] == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("Gauss-Jacobi reproduces Beta-type moments") {
    // int (1-x^2)^a x^2 dx against tanh-sinh
    for (double p : {2.0, 2.5, 3.0, 5.0}) {
        const double alpha = -1.0 / p;
        const QuadRule rule = gauss_jacobi(32, alpha, alpha);
        double s = 0.0;
        for (std::size_t i = 0; i < rule.x.size(); ++i)
            s += rule.w[i] * rule.x[i] * rule.x[i];
        const auto ref = tanh_sinh(
            TsIntegrand([alpha](double x, double da, double db) {
                return std::pow(da * db, alpha) * x * x;
            }),
            -1.0, 1.0, 1e-13);
        CHECK(s == doctest::Approx(ref.value).epsilon(1e-12));
    }
}

TEST_CASE("Gauss-Jacobi converges spectrally on a smooth factor") {
    const double alpha = -1.0 / 3.0;
    auto eval = [&](int n) {
        const QuadRule rule = gauss_jacobi(n, alpha, alpha);
        double s = 0.0;
        for (std::size_t i = 0; i < rule.x.size(); ++i)
            s += rule.w[i] * std::exp(rule.x[i]);
        return s;
    };
    const double coarse = eval(24), fine = eval(48), finer = eval(96);
    CHECK(std::fabs(fine - finer) <= 1e-14 * std::fabs(finer));
    CHECK(std::fabs(coarse - finer) <= 1e-12 * std::fabs(finer));
}

TEST_CASE("brent_root refines a bracketed root") {
    const double r = brent_root([](double x) { return x * x - 2.0; }, 0.0, 2.0);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(brent_root([](double x) { return x * x + 1.0; }, 0.0, 1.0),
                    std::invalid_argument);
}
