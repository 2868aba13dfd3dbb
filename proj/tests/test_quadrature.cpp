#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "dressed/bessel.hpp"
#include "dressed/quadrature.hpp"

using namespace dressed;
using namespace dressed::specfun;

TEST_CASE("exponential integral over the half-line") {
  QuadratureSpec spec;
  spec.mapping = RangeMapping::semi_infinite_exp;
  auto r = integrate([](double x) { return std::exp(-x); }, 0.0,
                     std::numeric_limits<double>::infinity(), spec);
  REQUIRE(r.converged);
  REQUIRE(std::abs(r.value - 1.0) < 1e-12);
}

TEST_CASE("squared MacDonald integral") {
  // int_0^inf K0^2 = pi^2/4
  QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  spec.rel_tol = 1e-11;
  spec.max_subdivisions = 800;
  auto head = integrate([](double x) { return bessel_k0(x) * bessel_k0(x); }, 1e-280, 4.0, spec);
  auto tail = integrate([](double x) { return bessel_k0(x) * bessel_k0(x); }, 4.0, 120.0, spec);
  REQUIRE(head.converged);
  REQUIRE(tail.converged);
  REQUIRE_THAT(head.value + tail.value,
               Catch::Matchers::WithinRel(pi * pi / 4.0, 1e-8));
}

TEST_CASE("finite oscillatory range via half-period splitting") {
  // Reference from a 40-digit segment-wise evaluation.
  const double reference = 0.34336789424251003;
  QuadratureSpec spec;
  spec.period_hint = pi;
  spec.max_subdivisions = 4000;
  auto r = integrate([](double x) { return std::cos(x) / (1.0 + x); }, 0.0, 100.0 * pi, spec);
  REQUIRE(r.converged);
  REQUIRE(std::abs(r.value - reference) < 1e-8);
}

TEST_CASE("oscillatory tail with Euler acceleration") {
  // int_0^inf sin(x)/x = pi/2; the tail alternates over half-periods.
  QuadratureSpec spec;
  spec.period_hint = pi;
  spec.abs_tol = 1e-11;
  spec.rel_tol = 1e-11;
  spec.max_subdivisions = 3000;
  auto r = integrate([](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }, 0.0,
                     std::numeric_limits<double>::infinity(), spec);
  REQUIRE(r.converged);
  REQUIRE(std::abs(r.value - 0.5 * pi) < 1e-9);
}

TEST_CASE("complex integrand") {
  QuadratureSpec spec;
  auto r = integrate([](double x) { return std::polar(1.0, x); }, 0.0, 1.0, spec);
  REQUIRE(r.converged);
  REQUIRE(std::abs(r.value - complexd(std::sin(1.0), 1.0 - std::cos(1.0))) < 1e-12);
}

TEST_CASE("rational map is the default for infinite ranges") {
  auto r = integrate([](double x) { return 1.0 / ((1.0 + x) * (1.0 + x)); }, 0.0,
                     std::numeric_limits<double>::infinity());
  REQUIRE(r.converged);
  REQUIRE(std::abs(r.value - 1.0) < 1e-10);
}

TEST_CASE("tan map handles algebraic decay") {
  QuadratureSpec spec;
  spec.mapping = RangeMapping::semi_infinite_tan;
  auto r = integrate([](double x) { return 1.0 / (1.0 + x * x); }, 0.0,
                     std::numeric_limits<double>::infinity(), spec);
  REQUIRE(r.converged);
  REQUIRE(std::abs(r.value - 0.5 * pi) < 1e-10);
}

TEST_CASE("non-finite samples raise an evaluation error with the abscissa") {
  REQUIRE_THROWS_AS(integrate([](double x) { return 1.0 / (x - 0.5); }, 0.4999999999, 0.5000000001),
                    EvaluationError);
  try {
    integrate([](double) { return std::numeric_limits<double>::quiet_NaN(); }, 0.0, 1.0);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    REQUIRE(e.abscissa >= 0.0);
    REQUIRE(e.abscissa <= 1.0);
  }
}

TEST_CASE("subdivision cap reports non-convergence instead of throwing") {
  QuadratureSpec spec;
  spec.abs_tol = 1e-16;
  spec.rel_tol = 1e-16;
  spec.max_subdivisions = 3;
  auto r = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, spec);
  REQUIRE_FALSE(r.converged);
  REQUIRE(r.subdivisions_used == 3);
}

TEST_CASE("converged results respect the declared tolerance") {
  QuadratureSpec spec;
  spec.abs_tol = 1e-9;
  spec.rel_tol = 1e-9;
  auto r = integrate([](double x) { return std::exp(x); }, 0.0, 2.0, spec);
  REQUIRE(r.converged);
  REQUIRE(r.error_estimate <= std::max(spec.abs_tol, spec.rel_tol * std::abs(r.value)));
}

TEST_CASE("integrate is deterministic") {
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  auto f = [](double x) { return std::cos(10.0 * x) * std::exp(-x * x); };
  auto a = integrate(f, 0.0, 5.0, spec);
  auto b = integrate(f, 0.0, 5.0, spec);
  REQUIRE(a.value == b.value);
  REQUIRE(a.error_estimate == b.error_estimate);
  REQUIRE(a.subdivisions_used == b.subdivisions_used);
}

TEST_CASE("Gauss-Legendre nodes integrate polynomials exactly") {
  const auto& rule = gauss_legendre(32);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    s += rule.weights[i] * (5.0 * std::pow(x, 8) - 2.0 * std::pow(x, 4) + 1.0);
  }
  // exact: 2*(5/9 - 2/5 + 1)
  REQUIRE_THAT(s, Catch::Matchers::WithinRel(2.0 * (5.0 / 9.0 - 2.0 / 5.0 + 1.0), 1e-14));
}

TEST_CASE("Gauss-Hermite nodes reproduce Gaussian moments") {
  const auto& rule = gauss_hermite(24);
  double m0 = 0.0, m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    m0 += rule.weights[i];
    m2 += rule.weights[i] * x * x;
    m4 += rule.weights[i] * x * x * x * x;
  }
  const double sq = std::sqrt(pi);
  REQUIRE_THAT(m0, Catch::Matchers::WithinRel(sq, 1e-13));
  REQUIRE_THAT(m2, Catch::Matchers::WithinRel(0.5 * sq, 1e-13));
  REQUIRE_THAT(m4, Catch::Matchers::WithinRel(0.75 * sq, 1e-13));
}
