#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bridgelab/state_evolution.hpp"
#include "bridgelab/theory.hpp"

using namespace bridgelab;

TEST_CASE("plain least-squares error formula and its regime boundary") {
  CHECK(ols_amse(2.0, 0.1) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(ols_amse(1e6, 1.0) == doctest::Approx(1.000001).epsilon(1e-12));
  // blow-up toward the transition: sigma_w^2 * delta / (delta - 1)
  CHECK(ols_amse(1.0001, 0.01) == doctest::Approx(1e-4 * 1.0001 / 1e-4).epsilon(1e-9));
  CHECK_THROWS_AS(ols_amse(1.0, 0.1), inapplicable_error);
  CHECK_THROWS_AS(ols_amse(0.5, 0.1), inapplicable_error);
}

TEST_CASE("ridge closed form: limits, direct arithmetic, and the grid minimum") {
  const auto pm = SignalDistribution::point_mass({{1.0, 1.0}});

  // lambda -> 0 recovers the plain least-squares error
  CHECK(ridge_amse_closed(0.0, 2.0, 0.1, pm) == doctest::Approx(0.02).epsilon(1e-12));

  // direct arithmetic at lambda = 0.5, delta = 2: the threshold solves
  // 4 chi^2 - chi - 1 = 0, i.e. chi = (1+sqrt(17))/8
  const double chi = (1.0 + std::sqrt(17.0)) / 8.0;
  const double expect =
      2.0 * (4.0 * chi * chi + 0.01) / (2.0 * (1.0 + 2.0 * chi) * (1.0 + 2.0 * chi) - 1.0);
  CHECK(ridge_amse_closed(0.5, 2.0, 0.1, pm) == doctest::Approx(expect).epsilon(1e-12));

  // the transition edge: at delta = 1 and lambda = 0 the denominator
  // vanishes (for lambda > 0 the principal branch keeps it positive)
  CHECK_THROWS_AS(ridge_amse_closed(0.0, 1.0, 0.1, pm), inapplicable_error);
  CHECK(std::isfinite(ridge_amse_closed(1e-6, 0.5, 0.1, pm)));
}

TEST_CASE("ridge lambda minimum agrees with the fixed-point solve at q = 2") {
  for (const auto& d :
       {SignalDistribution::point_mass({{1.0, 1.0}}), SignalDistribution::uniform(1.0)}) {
    const RiskEvaluator ev(d);
    for (double delta : {1.5, 2.0}) {
      for (double sw : {0.1, 0.5}) {
        const RidgeMin rm = ridge_lambda_min(delta, sw, d);
        const SEOutcome se = solve(ev, 2.0, delta, sw, false);
        CHECK(std::abs(rm.amse - se.amse) <= 1e-6);
      }
    }
  }
}

TEST_CASE("small-noise expansion: valid branches") {
  const auto pm = SignalDistribution::point_mass({{1.0, 1.0}});

  const ExpansionReport r2 = small_noise_expansion(2.0, 2.0, 0.1, pm);
  CHECK(r2.validity == Validity::valid);
  CHECK(r2.first_term == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(r2.second_term == doctest::Approx(-8e-4).epsilon(1e-12));

  const ExpansionReport r15 = small_noise_expansion(1.5, 2.0, 0.01, pm);
  CHECK(r15.validity == Validity::valid);
  CHECK(r15.second_term == doctest::Approx(-2e-8).epsilon(1e-12));
  REQUIRE(r15.cq.has_value());
  CHECK(*r15.cq == doctest::Approx(0.25).epsilon(1e-14));

  // bounded away from zero at q = 1: exponentially small second order
  const ExpansionReport r1 = small_noise_expansion(1.0, 2.0, 0.05, pm);
  CHECK(r1.validity == Validity::valid);
  CHECK(r1.second_term == 0.0);
}

TEST_CASE("small-noise expansion: near-zero mass branches") {
  // mass too heavy at zero for q = 1.5: 2 - q = 0.5 > ell = 0.3
  const auto heavy = SignalDistribution::power_zero(0.3, 1.0);
  const ExpansionReport bad = small_noise_expansion(1.5, 2.0, 0.01, heavy);
  CHECK(bad.validity == Validity::inapplicable);
  CHECK(std::isinf(heavy.moment(1.5 - 2.0)));

  // exactly at the boundary ell = 2 - q the moment diverges as well
  const auto edge = SignalDistribution::power_zero(0.5, 1.0);
  CHECK(small_noise_expansion(1.5, 2.0, 0.01, edge).validity == Validity::inapplicable);
  // strictly inside the condition the formula applies
  CHECK(small_noise_expansion(1.8, 2.0, 0.01, edge).validity == Validity::valid);

  // lasso on power-law mass: exponent bracket only
  const ExpansionReport br = small_noise_expansion(1.0, 2.0, 0.1, edge);
  CHECK(br.validity == Validity::lasso_bracket_only);
  CHECK(br.second_term == doctest::Approx(-std::pow(0.1, 3.0)).epsilon(1e-12));

  // uniform law at q = 2 stays on the valid q-2 formula
  const auto uni = SignalDistribution::uniform(1.0);
  const ExpansionReport u2 = small_noise_expansion(2.0, 2.0, 0.1, uni);
  CHECK(u2.validity == Validity::valid);
  CHECK(u2.second_term == doctest::Approx(-8.0 * 3.0 * 1e-4).epsilon(1e-12));

  CHECK_THROWS_AS(small_noise_expansion(1.5, 0.9, 0.1, uni), inapplicable_error);
}

TEST_CASE("large-sample expansion branches") {
  const auto pm = SignalDistribution::point_mass({{1.0, 1.0}});

  const ExpansionReport r2 = large_delta_expansion(2.0, 100.0, 0.5, pm);
  CHECK(r2.validity == Validity::valid);
  CHECK(r2.first_term == doctest::Approx(0.0025).epsilon(1e-14));
  CHECK(r2.second_term == doctest::Approx(1.875e-5).epsilon(1e-12));

  // q = 1 bounded away: the shrinkage gain vanishes, second order is sw^2/d^2
  const ExpansionReport r1 = large_delta_expansion(1.0, 50.0, 0.5, pm);
  CHECK(r1.validity == Validity::valid);
  CHECK(r1.second_term == doctest::Approx(0.25 / 2500.0).epsilon(1e-12));

  // lasso exponent bracket for power-law mass with ell < 1
  const ExpansionReport br = large_delta_expansion(1.0, 50.0, 0.5,
                                                   SignalDistribution::power_zero(0.5, 1.0));
  CHECK(br.validity == Validity::lasso_bracket_only);
  CHECK(br.second_term == doctest::Approx(-std::pow(50.0, -1.5)).epsilon(1e-12));

  // ell = 1 laws sit outside the stated q = 1 rate
  CHECK(large_delta_expansion(1.0, 50.0, 0.5, SignalDistribution::uniform(1.0)).validity ==
        Validity::inapplicable);
}

TEST_CASE("cq closed forms per family") {
  // equal two-point masses: (q-1)^2 / mu^2
  const auto equal = SignalDistribution::two_point(2.0, 2.0 + 1e-300, 0.5);
  for (double q : {1.2, 1.7, 2.0})
    CHECK(cq(q, equal) == doctest::Approx((q - 1.0) * (q - 1.0) / 4.0).epsilon(1e-12));

  // uniform: (2q-1)/theta^2
  for (double theta : {1.0, 2.5}) {
    const auto uni = SignalDistribution::uniform(theta);
    for (double q : {1.2, 1.5, 2.0})
      CHECK(cq(q, uni) == doctest::Approx((2.0 * q - 1.0) / (theta * theta)).epsilon(1e-10));
  }

  // exponential tail via the integration-by-parts identity
  // Cq = tau^2 q0^2 (E|B|^(q+q0-2))^2 / E|B|^(2q-2); at tau = q0 = 1, q = 1.5
  // both routes give Gamma(1.5)^2 = pi/4
  const auto exp1 = SignalDistribution::exp_tail(1.0, 1.0);
  CHECK(cq(1.5, exp1) == doctest::Approx(M_PI / 4.0).epsilon(1e-8));
  const double lhs = cq(1.5, exp1);
  const double rhs = 1.0 * 1.0 * std::pow(exp1.moment(0.5), 2) / exp1.moment(1.0);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));

  // (q-1)^2 kills the constant toward q = 1 for magnitudes bounded away
  // from zero; with mass at zero E|B|^(q-2) blows up like 1/(q-1) instead
  // and the constant tends to a positive limit (uniform: (2q-1)/theta^2)
  CHECK(cq(1.0 + 1e-6, SignalDistribution::two_point(1.0, 3.0, 0.5)) <= 1e-11);
  CHECK(cq(1.0 + 1e-6, SignalDistribution::point_mass({{2.0, 1.0}})) <= 1e-11);
  CHECK(cq(1.0 + 1e-6, SignalDistribution::uniform(1.0)) == doctest::Approx(1.0).epsilon(1e-4));

  CHECK_THROWS_AS(cq(1.0, exp1), std::invalid_argument);
  CHECK_THROWS_AS(cq(1.3, SignalDistribution::power_zero(0.5, 1.0)), inapplicable_error);
}

TEST_CASE("q_star reproduces the family-specific optima") {
  // uniform: cq increasing in q, argmax exactly at the endpoint 2
  const QStarResult uni = q_star(SignalDistribution::uniform(1.0));
  CHECK(uni.q_star == 2.0);

  // exponential tail with q0 = 1.5: interior maximum at q0
  const QStarResult et = q_star(SignalDistribution::exp_tail(2.0, 1.5));
  CHECK(std::abs(et.q_star - 1.5) <= 0.01);

  // wide two-point mixture: argmax pushed toward 1; frozen curve maximum
  const QStarResult tp = q_star(SignalDistribution::two_point(1.0, 100.0, 0.5));
  CHECK(tp.q_star == doctest::Approx(1.24762).epsilon(1e-3));

  // power-law mass: points below ell's divergence threshold are skipped
  const QStarResult pz = q_star(SignalDistribution::power_zero(0.5, 1.0));
  CHECK(!pz.skipped.empty());
  CHECK(pz.q_star > 1.5);
}

TEST_CASE("q_star scale equivariance for two-point mixtures") {
  const QStarResult a = q_star(SignalDistribution::two_point(1.0, 10.0, 0.3));
  const QStarResult b = q_star(SignalDistribution::two_point(5.0, 50.0, 0.3));
  CHECK(a.q_star == doctest::Approx(b.q_star).epsilon(1e-10));
}

TEST_CASE("expansion consistency against the fixed-point solver") {
  // the central check: (se.amse - first)/sw^4 drifts toward -d^3 Cq/(d-1)^3
  const auto uni = SignalDistribution::uniform(1.0);
  const RiskEvaluator ev(uni);
  const double limit = -8.0 * cq(1.5, uni);
  double prev_gap = 1e300;
  for (double sw : {0.1, 0.05, 0.025, 0.0125}) {
    const SEOutcome o = solve(ev, 1.5, 2.0, sw, false);
    const double ratio = (o.amse - sw * sw / 0.5) / std::pow(sw, 4);
    const double gap = std::abs(ratio - limit);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap <= 0.15 * std::abs(limit));
}
