#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bridgelab/quadrature.hpp"

using namespace bridgelab;

TEST_CASE("gauss-hermite-normal reproduces standard normal moments") {
  for (int n : {8, 61, 122, 201}) {
    const Quadrature rule = gauss_hermite_normal(n);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
    double w_sum = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      CHECK(rule.weights[i] > 0.0);
      w_sum += rule.weights[i];
      m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
      m4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
    }
    CHECK(std::abs(w_sum - 1.0) <= 1e-13);
    CHECK(std::abs(m2 - 1.0) <= 1e-10);
    if (n >= 8) CHECK(std::abs(m4 - 3.0) <= 1e-9);
  }
}

TEST_CASE("gauss-legendre integrates polynomials and smooth functions") {
  const Quadrature rule = gauss_legendre(24, 0.0, 1.0);
  CHECK(std::abs(rule.apply([](double x) { return x * x; }) - 1.0 / 3.0) <= 1e-14);
  CHECK(std::abs(rule.apply([](double x) { return std::exp(x); }) - (std::exp(1.0) - 1.0)) <=
        1e-13);
  const Quadrature shifted = gauss_legendre(32, -2.0, 5.0);
  CHECK(std::abs(shifted.apply([](double x) { return std::sin(x); }) -
                 (std::cos(-2.0) - std::cos(5.0))) <= 1e-12);
}

TEST_CASE("adaptive simpson handles smooth and substituted singular integrands") {
  const double smooth = integrate_adaptive([](double x) { return std::exp(-x * x); }, 0.0, 6.0);
  CHECK(std::abs(smooth - 0.5 * std::sqrt(M_PI)) <= 1e-10);
  // integral of x^-0.5 over (0,1] after x = u^2: 2 du on [0,1]
  const double sub = integrate_adaptive([](double) { return 2.0; }, 0.0, 1.0);
  CHECK(std::abs(sub - 2.0) <= 1e-12);
}

TEST_CASE("quadrature argument validation") {
  CHECK_THROWS_AS(gauss_hermite_normal(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), std::invalid_argument);
}
