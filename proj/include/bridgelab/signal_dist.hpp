#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "bridgelab/quadrature.hpp"

namespace bridgelab {

// Signal-coordinate distributions. All of them are atom-free at zero and have
// a finite second moment. The estimation risk depends on the coordinate law
// only through its magnitude, so every variant is handled as a law of |B|
// plus an independent uniform sign drawn at sampling time.

struct PointMassSet {
  // (value, prob); values nonzero, probs sum to 1. Magnitudes |value| carry
  // the law, signs are randomized like the continuous variants.
  std::vector<std::pair<double, double>> atoms;
};

struct TwoPointMagnitude {
  double mu1 = 1.0;   // smaller support point, > 0
  double mu2 = 1.0;   // larger support point, >= mu1
  double alpha = 0.5; // mass at mu1, in (0,1)
};

struct UniformMagnitude {
  double theta = 1.0;  // |B| ~ Uniform[0, theta]
};

struct ExpTailMagnitude {
  double tau = 1.0;  // density zeta(tau,q0) * exp(-tau b^q0) on [0, inf)
  double q0 = 1.0;   // tail exponent, in (0, 2]
};

struct PowerZeroMagnitude {
  double ell = 1.0;  // P(|B| <= t) = (t/cap)^ell on [0, cap]
  double cap = 1.0;
};

class SignalDistribution {
 public:
  using Variant =
      std::variant<PointMassSet, TwoPointMagnitude, UniformMagnitude, ExpTailMagnitude,
                   PowerZeroMagnitude>;

  explicit SignalDistribution(Variant v);

  static SignalDistribution point_mass(std::vector<std::pair<double, double>> atoms);
  static SignalDistribution two_point(double mu1, double mu2, double alpha);
  static SignalDistribution uniform(double theta);
  static SignalDistribution exp_tail(double tau, double q0);
  static SignalDistribution power_zero(double ell, double cap);

  // E|B|^r. Returns +infinity when the integral diverges (an observable
  // value, not an error: expansion applicability checks need to see it).
  // Throws std::invalid_argument on NaN r.
  double moment(double r) const;

  // The exponent l with P(|B| <= t) = Theta(t^l) near zero, or nullopt when
  // the magnitude is bounded away from zero.
  std::optional<double> cdf_zero_exponent() const;

  // P(|B| <= t).
  double magnitude_cdf(double t) const;

  // Deterministic signed samples: magnitude draw times an independent +-1.
  std::vector<double> sample(std::size_t count, std::uint64_t seed) const;

  // Quadrature rule over |B|: apply(f) ~ E f(|B|). Discrete variants get the
  // exact atoms; continuous ones a Gauss-Legendre rule with the measure
  // folded in (tail truncated / singularity substituted away as needed).
  Quadrature expectation_rule(int node_budget = 200) const;

  double second_moment() const { return second_moment_; }
  const Variant& variant() const { return v_; }

 private:
  Variant v_;
  double second_moment_ = 0.0;
  double exp_tail_zeta_ = 0.0;      // cached normalization for ExpTailMagnitude
  double exp_tail_cutoff_ = 0.0;    // b beyond which tail mass < 1e-14
};

}  // namespace bridgelab
