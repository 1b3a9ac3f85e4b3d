#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nomaec/specfun.hpp"
#include "oracles.hpp"

using namespace nomaec;

// Reference values computed with mpmath at 50 digits.

TEST_CASE("erf golden values") {
    CHECK(nomaec::erf(0.0) == 0.0);
    CHECK(nomaec::erf(1.0) == Catch::Approx(0.842700792949715).margin(1e-12));
    CHECK(nomaec::erf(0.5) == Catch::Approx(0.52049987781304654).margin(1e-13));
    CHECK(nomaec::erf(2.0) == Catch::Approx(0.99532226501895273).margin(1e-13));
    CHECK(nomaec::erf(3.5) == Catch::Approx(0.99999925690162766).margin(1e-13));
}

TEST_CASE("erf matches the Taylor-series oracle") {
    for (double x : {0.05, 0.3, 0.9, 1.7, 2.4, 3.1, 4.0}) {
        CHECK(nomaec::erf(x) == Catch::Approx(oracles::erf_taylor(x)).margin(1e-13));
    }
}

TEST_CASE("erf is odd and bounded") {
    CHECK(nomaec::erf(-0.7) == -nomaec::erf(0.7));
    double prev = -1.0;
    for (double x = -6.0; x <= 6.0; x += 0.125) {
        const double v = nomaec::erf(x);
        // |erf| < 1 wherever that is representable (the correctly rounded
        // double equals 1.0 beyond |x| ~ 5.9)
        if (std::abs(x) <= 5.25) CHECK(std::abs(v) < 1.0);
        CHECK(v >= prev);  // monotone nondecreasing
        prev = v;
    }
}

TEST_CASE("erfc golden values and symmetry") {
    CHECK(nomaec::erfc(0.25) == Catch::Approx(0.72367360983176307).epsilon(1e-12));
    CHECK(nomaec::erfc(1.0) == Catch::Approx(0.15729920705028513).epsilon(1e-12));
    CHECK(nomaec::erfc(2.0) == Catch::Approx(0.0046777349810472658).epsilon(1e-12));
    CHECK(nomaec::erfc(3.0) == Catch::Approx(2.2090496998585441e-5).epsilon(1e-12));
    CHECK(nomaec::erfc(5.0) == Catch::Approx(1.5374597944280349e-12).epsilon(1e-12));
    CHECK(nomaec::erfc(10.0) == Catch::Approx(2.0884875837625448e-45).epsilon(1e-12));
    CHECK(nomaec::erfc(-1.0) == Catch::Approx(2.0 - 0.15729920705028513).epsilon(1e-14));
    for (double x = -3.0; x <= 8.0; x += 0.25)
        CHECK(nomaec::erf(x) + nomaec::erfc(x) == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("log_erfc stays finite and accurate far into the tail") {
    CHECK(log_erfc(3.0) == Catch::Approx(-10.720363041981113).epsilon(1e-12));
    CHECK(log_erfc(8.0) == Catch::Approx(-66.659471970805161).epsilon(1e-12));
    CHECK(log_erfc(20.0) == Catch::Approx(-403.56934333410423).epsilon(1e-12));
    CHECK(log_erfc(100.0) == Catch::Approx(-10005.177585122664).epsilon(1e-12));
    CHECK(log_erfc(1000.0) == Catch::Approx(-1000007.4801207219).epsilon(1e-12));
    for (double x = -2.0; x < 2.0; x += 0.25)
        CHECK(log_erfc(x) == Catch::Approx(std::log(nomaec::erfc(x))).epsilon(1e-13));
}

TEST_CASE("gamma golden values") {
    CHECK(gamma_fn(1.0) == Catch::Approx(1.0).epsilon(1e-13));
    CHECK(gamma_fn(5.0) == Catch::Approx(24.0).epsilon(1e-13));
    CHECK(gamma_fn(0.5) == Catch::Approx(1.7724538509055160).margin(1e-9));
    CHECK(gamma_fn(1.5) == Catch::Approx(0.88622692545275801).epsilon(1e-12));
    CHECK(gamma_fn(-0.5) == Catch::Approx(-3.5449077018110321).epsilon(1e-12));
    CHECK(gamma_fn(-1.5) == Catch::Approx(2.3632718012073547).epsilon(1e-12));
    CHECK(gamma_fn(-2.5) == Catch::Approx(-0.94530872048294188).epsilon(1e-12));
    CHECK(gamma_fn(-3.7) == Catch::Approx(0.25164399590242264).epsilon(1e-12));
    CHECK(gamma_fn(0.1) == Catch::Approx(9.5135076986687318).epsilon(1e-12));
    CHECK(gamma_fn(7.3) == Catch::Approx(1271.4236336639093).epsilon(1e-12));
    CHECK(gamma_fn(9.9) == Catch::Approx(289867.70384010941).epsilon(1e-12));
}

TEST_CASE("gamma recurrence on the half-integer grid") {
    for (double x = -3.5; x <= 9.5; x += 1.0) {
        const double lhs = gamma_fn(x + 1.0);
        const double rhs = x * gamma_fn(x);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("gamma poles are rejected") {
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-1.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-7.0), std::domain_error);
}

TEST_CASE("U(1,2,z) has the analytic value 1/z") {
    for (double z : {0.5, 2.0, 10.0})
        CHECK(hyper_u_a1(2.0, z) * z == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("U(1,1,1) equals e*E1(1)") {
    const double expected = std::exp(1.0) * oracles::expint_e1(1.0);
    CHECK(expected == Catch::Approx(0.59634736232319407).epsilon(1e-12));  // oracle sanity
    CHECK(hyper_u_a1(1.0, 1.0) == Catch::Approx(expected).margin(1e-8));
}

TEST_CASE("U(1,b,z) golden values") {
    CHECK(hyper_u_a1(1.5, 2.0) == Catch::Approx(0.42136922928805447).epsilon(1e-9));
    CHECK(hyper_u_a1(-3.0, 0.7) == Catch::Approx(0.20532158302537933).epsilon(1e-9));
    CHECK(hyper_u_a1(0.5, 5.0) == Catch::Approx(0.15842971109221217).epsilon(1e-9));
    CHECK(hyper_u_a1(1.95, 1e-5) == Catch::Approx(58002.409917380439).epsilon(1e-8));
}

TEST_CASE("U(1,3,z) approaches its Watson-lemma leading term") {
    CHECK(1e4 * hyper_u_a1(3.0, 1e4) == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("U(1,b,z) decreases in z") {
    for (double b : {-2.0, 0.5, 1.9}) {
        double prev = hyper_u_a1(b, 0.25);
        for (double z = 0.5; z <= 16.0; z *= 2.0) {
            const double v = hyper_u_a1(b, z);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("U domain errors") {
    CHECK_THROWS_AS(hyper_u_a1(2.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(hyper_u_a1(2.0, -1.0), std::domain_error);
}

TEST_CASE("semi-infinite quadrature normalizations") {
    QuadratureSpec q;
    CHECK(integrate_semi_infinite([](double t) { return std::exp(-t); }, q) ==
          Catch::Approx(1.0).epsilon(1e-12));
    CHECK(integrate_semi_infinite(
              [](double t) { return 2.0 * std::exp(-t) * (1.0 - std::exp(-t)); }, q) ==
          Catch::Approx(1.0).epsilon(1e-12));
    CHECK(integrate_semi_infinite([](double t) { return t * std::exp(-t); }, q) ==
          Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quadrature handles an integrable endpoint singularity") {
    // integral_0^inf t^(-1/2) e^(-t) dt = sqrt(pi)
    QuadratureSpec q;
    q.rel_tol = 1e-9;
    const double v = integrate_semi_infinite(
        [](double t) { return std::exp(-t) / std::sqrt(t); }, q);
    CHECK(v == Catch::Approx(1.7724538509055160).epsilon(1e-8));
}

TEST_CASE("quadrature result is stable under tighter subdivision budgets") {
    QuadratureSpec q1;
    q1.rel_tol = 1e-9;
    QuadratureSpec q2 = q1;
    q2.max_subdivisions *= 2;
    auto f = [](double t) { return std::exp(-0.31 * t) / (1.0 + t * t); };
    const double a = integrate_semi_infinite(f, q1);
    const double b = integrate_semi_infinite(f, q2);
    CHECK(std::abs(a - b) <= 10.0 * (q1.rel_tol * std::abs(a)));
}

TEST_CASE("divergent integrals raise convergence_error instead of lying") {
    QuadratureSpec q;
    q.max_subdivisions = 200;
    CHECK_THROWS_AS(integrate_semi_infinite([](double t) { return 1.0 / (1.0 + t); }, q),
                    convergence_error);
}

TEST_CASE("finite-interval quadrature sanity") {
    const double v = integrate_interval([](double x) { return std::sin(x); }, 0.0,
                                        3.141592653589793);
    CHECK(v == Catch::Approx(2.0).epsilon(1e-12));
    // cross-check against the tanh-sinh oracle on a lumpy integrand
    auto f = [](double x) { return std::exp(-x) * std::cos(7.0 * x * x); };
    const double mine = integrate_interval(f, 0.0, 3.0);
    const double ref = oracles::tanh_sinh(f, 0.0, 3.0);
    CHECK(mine == Catch::Approx(ref).margin(1e-10));
}
