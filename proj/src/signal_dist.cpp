#include "bridgelab/signal_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bridgelab/rng.hpp"

namespace bridgelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailMass = 1e-14;

// integral of b^r * exp(-tau*b^q0) over [0, inf), the singular endpoint
// removed by a power substitution on [0,1]
double exp_tail_raw_integral(double tau, double q0, double r) {
  if (r <= -1.0) return kInf;
  // cutoff where tau*b^q0 - r*log(b) > 60, iterated once from a crude start
  double bT = std::pow(62.0 / tau, 1.0 / q0) + 1.0;
  for (int i = 0; i < 4; ++i) {
    const double want = 62.0 + std::max(0.0, r * std::log(bT));
    bT = std::pow(want / tau, 1.0 / q0) + 1.0;
  }
  const double k = std::max(1.0, std::ceil(5.0 / (1.0 + r)));
  const auto left = [&](double u) {
    const double b = std::pow(u, k);
    return k * std::pow(u, k * (1.0 + r) - 1.0) * std::exp(-tau * std::pow(b, q0));
  };
  const auto right = [&](double b) { return std::pow(b, r) * std::exp(-tau * std::pow(b, q0)); };
  double total = integrate_adaptive(left, 0.0, 1.0, 1e-11);
  if (bT > 1.0) total += integrate_adaptive(right, 1.0, bT, 1e-11);
  return total;
}

void validate(const SignalDistribution::Variant& v) {
  if (const auto* pm = std::get_if<PointMassSet>(&v)) {
    if (pm->atoms.empty()) throw std::invalid_argument("point mass set needs at least one atom");
    double total = 0.0;
    for (const auto& [value, prob] : pm->atoms) {
      if (value == 0.0 || !std::isfinite(value))
        throw std::invalid_argument("point mass atoms must be finite and nonzero");
      if (!(prob > 0.0 && prob <= 1.0))
        throw std::invalid_argument("point mass probabilities must lie in (0,1]");
      total += prob;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("point mass probabilities must sum to 1");
  } else if (const auto* tp = std::get_if<TwoPointMagnitude>(&v)) {
    if (!(tp->mu1 > 0.0) || !(tp->mu2 >= tp->mu1))
      throw std::invalid_argument("two point magnitudes need 0 < mu1 <= mu2");
    if (!(tp->alpha > 0.0 && tp->alpha < 1.0))
      throw std::invalid_argument("two point alpha must lie in (0,1)");
  } else if (const auto* un = std::get_if<UniformMagnitude>(&v)) {
    if (!(un->theta > 0.0)) throw std::invalid_argument("uniform theta must be positive");
  } else if (const auto* et = std::get_if<ExpTailMagnitude>(&v)) {
    if (!(et->tau > 0.0)) throw std::invalid_argument("exp tail tau must be positive");
    if (!(et->q0 > 0.0 && et->q0 <= 2.0))
      throw std::invalid_argument("exp tail q0 must lie in (0,2]");
  } else if (const auto* pz = std::get_if<PowerZeroMagnitude>(&v)) {
    if (!(pz->ell > 0.0) || !(pz->cap > 0.0))
      throw std::invalid_argument("power zero needs ell > 0 and cap > 0");
  }
}

}  // namespace

SignalDistribution::SignalDistribution(Variant v) : v_(std::move(v)) {
  validate(v_);
  if (const auto* et = std::get_if<ExpTailMagnitude>(&v_)) {
    exp_tail_zeta_ = 1.0 / exp_tail_raw_integral(et->tau, et->q0, 0.0);
    // smallest b with tail mass below kTailMass, by bisection on the tail integral
    double lo = 0.0;
    double hi = std::pow(80.0 / et->tau, 1.0 / et->q0) + 1.0;
    const auto tail = [&](double b) {
      return exp_tail_zeta_ *
             integrate_adaptive(
                 [&](double s) { return std::exp(-et->tau * std::pow(s, et->q0)); }, b, hi + 10.0,
                 1e-9, 1e-20);
    };
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (tail(mid) > kTailMass ? lo : hi) = mid;
    }
    exp_tail_cutoff_ = hi;
  }
  second_moment_ = moment(2.0);
}

SignalDistribution SignalDistribution::point_mass(std::vector<std::pair<double, double>> atoms) {
  return SignalDistribution(PointMassSet{std::move(atoms)});
}
SignalDistribution SignalDistribution::two_point(double mu1, double mu2, double alpha) {
  return SignalDistribution(TwoPointMagnitude{mu1, mu2, alpha});
}
SignalDistribution SignalDistribution::uniform(double theta) {
  return SignalDistribution(UniformMagnitude{theta});
}
SignalDistribution SignalDistribution::exp_tail(double tau, double q0) {
  return SignalDistribution(ExpTailMagnitude{tau, q0});
}
SignalDistribution SignalDistribution::power_zero(double ell, double cap) {
  return SignalDistribution(PowerZeroMagnitude{ell, cap});
}

double SignalDistribution::moment(double r) const {
  if (std::isnan(r)) throw std::invalid_argument("moment: r is NaN");
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PointMassSet>) {
          double acc = 0.0;
          for (const auto& [value, prob] : d.atoms) acc += prob * std::pow(std::abs(value), r);
          return acc;
        } else if constexpr (std::is_same_v<T, TwoPointMagnitude>) {
          return d.alpha * std::pow(d.mu1, r) + (1.0 - d.alpha) * std::pow(d.mu2, r);
        } else if constexpr (std::is_same_v<T, UniformMagnitude>) {
          if (r <= -1.0) return kInf;
          return std::pow(d.theta, r) / (r + 1.0);
        } else if constexpr (std::is_same_v<T, ExpTailMagnitude>) {
          if (r <= -1.0) return kInf;
          return exp_tail_zeta_ * exp_tail_raw_integral(d.tau, d.q0, r);
        } else {
          if (r <= -d.ell) return kInf;
          return d.ell * std::pow(d.cap, r) / (r + d.ell);
        }
      },
      v_);
}

std::optional<double> SignalDistribution::cdf_zero_exponent() const {
  return std::visit(
      [](const auto& d) -> std::optional<double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformMagnitude>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, ExpTailMagnitude>) {
          return 1.0;  // density positive at zero, so the CDF is linear there
        } else if constexpr (std::is_same_v<T, PowerZeroMagnitude>) {
          return d.ell;
        } else {
          (void)d;
          return std::nullopt;
        }
      },
      v_);
}

double SignalDistribution::magnitude_cdf(double t) const {
  if (t < 0.0) return 0.0;
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PointMassSet>) {
          double acc = 0.0;
          for (const auto& [value, prob] : d.atoms)
            if (std::abs(value) <= t) acc += prob;
          return acc;
        } else if constexpr (std::is_same_v<T, TwoPointMagnitude>) {
          double acc = 0.0;
          if (d.mu1 <= t) acc += d.alpha;
          if (d.mu2 <= t) acc += 1.0 - d.alpha;
          return acc;
        } else if constexpr (std::is_same_v<T, UniformMagnitude>) {
          return std::min(t / d.theta, 1.0);
        } else if constexpr (std::is_same_v<T, ExpTailMagnitude>) {
          if (t == 0.0) return 0.0;
          return exp_tail_zeta_ *
                 integrate_adaptive(
                     [&](double b) { return std::exp(-d.tau * std::pow(b, d.q0)); }, 0.0,
                     std::min(t, exp_tail_cutoff_ + 10.0), 1e-11);
        } else {
          return t >= d.cap ? 1.0 : std::pow(t / d.cap, d.ell);
        }
      },
      v_);
}

std::vector<double> SignalDistribution::sample(std::size_t count, std::uint64_t seed) const {
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  Rng rng(Rng::mix(seed, 0x5d15));
  std::vector<double> out(count);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        for (std::size_t i = 0; i < count; ++i) {
          double mag = 0.0;
          if constexpr (std::is_same_v<T, PointMassSet>) {
            const double u = rng.uniform();
            double cum = 0.0;
            mag = std::abs(d.atoms.back().first);
            for (const auto& [value, prob] : d.atoms) {
              cum += prob;
              if (u < cum) {
                mag = std::abs(value);
                break;
              }
            }
          } else if constexpr (std::is_same_v<T, TwoPointMagnitude>) {
            mag = rng.uniform() < d.alpha ? d.mu1 : d.mu2;
          } else if constexpr (std::is_same_v<T, UniformMagnitude>) {
            mag = d.theta * rng.uniform();
          } else if constexpr (std::is_same_v<T, ExpTailMagnitude>) {
            mag = std::pow(rng.gamma(1.0 / d.q0, d.tau), 1.0 / d.q0);
          } else {
            mag = d.cap * std::pow(rng.uniform(), 1.0 / d.ell);
          }
          out[i] = mag * rng.sign();
        }
      },
      v_);
  return out;
}

Quadrature SignalDistribution::expectation_rule(int node_budget) const {
  if (node_budget < 8) throw std::invalid_argument("expectation_rule: node_budget must be >= 8");
  return std::visit(
      [&](const auto& d) -> Quadrature {
        using T = std::decay_t<decltype(d)>;
        Quadrature rule;
        if constexpr (std::is_same_v<T, PointMassSet>) {
          rule.kind = Quadrature::Kind::discrete_exact;
          for (const auto& [value, prob] : d.atoms) {
            rule.nodes.push_back(std::abs(value));
            rule.weights.push_back(prob);
          }
        } else if constexpr (std::is_same_v<T, TwoPointMagnitude>) {
          rule.kind = Quadrature::Kind::discrete_exact;
          rule.nodes = {d.mu1, d.mu2};
          rule.weights = {d.alpha, 1.0 - d.alpha};
        } else if constexpr (std::is_same_v<T, UniformMagnitude>) {
          rule = gauss_legendre(node_budget, 0.0, d.theta);
          for (double& w : rule.weights) w /= d.theta;
        } else if constexpr (std::is_same_v<T, ExpTailMagnitude>) {
          // substitute b = v^c with integer c: the Jacobi factor v^(c-1)
          // becomes polynomial and the truncated interval compresses, so the
          // fixed Legendre rule sees a smooth, short integrand
          const double c = std::max(4.0, std::ceil(4.0 / d.q0));
          rule = gauss_legendre(node_budget, 0.0, std::pow(exp_tail_cutoff_, 1.0 / c));
          for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double v = rule.nodes[i];
            const double b = std::pow(v, c);
            rule.weights[i] *=
                exp_tail_zeta_ * c * std::pow(v, c - 1.0) * std::exp(-d.tau * std::pow(b, d.q0));
            rule.nodes[i] = b;
          }
        } else {
          // substitute b = cap * u^(1/ell): the transformed measure on u is
          // uniform on [0,1], removing the density singularity at b = 0
          rule = gauss_legendre(node_budget, 0.0, 1.0);
          for (double& x : rule.nodes) x = d.cap * std::pow(x, 1.0 / d.ell);
        }
        return rule;
      },
      v_);
}

}  // namespace bridgelab
