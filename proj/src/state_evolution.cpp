#include "bridgelab/state_evolution.hpp"

#include <cmath>
#include <stdexcept>

namespace bridgelab {

namespace {

struct FixedPointFn {
  const RiskEvaluator& evaluator;
  double q;
  double delta;
  double sigma_eff2;
  const SEConfig& cfg;
  mutable int evals = 0;

  RiskPoint chi_solution(double sigma) const {
    if (cfg.force_chi_zero) {
      RiskPoint p;
      p.q = q;
      p.sigma = sigma;
      p.risk = 1.0;
      return p;
    }
    return evaluator.optimal_chi(q, sigma, cfg.chi_search);
  }

  // h(s) = s - sigma_eff^2 - s R / delta; increasing through the fixed point
  // on the bracket since R <= 1
  double operator()(double s) const {
    ++evals;
    const RiskPoint p = chi_solution(std::sqrt(s));
    return s - sigma_eff2 - s * p.risk / delta;
  }
};

// Brent's method on a sign-changing bracket: keeps the unconditional
// bisection guarantee, converges superlinearly on this smooth h.
double brent_root(const FixedPointFn& h, double a, double b, double fa, double fb, double xtol_rel,
                  double ftol, int max_iters) {
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iters; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 0.5 * xtol_rel * std::abs(b) + 1e-300;
    const double mid = 0.5 * (c - b);
    if (std::abs(fb) <= ftol || std::abs(mid) <= tol) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, qq;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * mid * s;
        qq = 1.0 - s;
      } else {
        const double r1 = fa / fc, r2 = fb / fc;
        p = s * (2.0 * mid * r1 * (r1 - r2) - (b - a) * (r2 - 1.0));
        qq = (r1 - 1.0) * (r2 - 1.0) * (s - 1.0);
      }
      if (p > 0.0) qq = -qq;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * mid * qq - std::abs(tol * qq), std::abs(e * qq))) {
        e = d;
        d = p / qq;
      } else {
        d = mid;
        e = d;
      }
    } else {
      d = mid;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (mid > 0.0 ? tol : -tol);
    fb = h(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

}  // namespace

SEOutcome solve(const RiskEvaluator& evaluator, double q, double delta, double sigma_w,
                bool scaled, const SEConfig& cfg) {
  if (!(q >= 1.0 && q <= 2.0)) throw std::invalid_argument("solve: q must lie in [1,2]");
  if (!(delta > 0.0)) throw std::invalid_argument("solve: delta must be positive");
  if (!(sigma_w >= 0.0)) throw std::invalid_argument("solve: sigma_w must be >= 0");

  SEOutcome out;
  out.q = q;
  out.delta = delta;
  out.sigma_w = sigma_w;
  out.scaled = scaled;

  if (sigma_w == 0.0) {
    // noiseless: above the transition the fixed point is exactly zero, below
    // it only degenerate solutions remain
    if (delta <= 1.0)
      throw std::invalid_argument("solve: sigma_w = 0 requires delta > 1");
    return out;
  }

  const double sigma_eff = scaled ? sigma_w / std::sqrt(delta) : sigma_w;
  const double s_lo = sigma_eff * sigma_eff;
  FixedPointFn h{evaluator, q, delta, s_lo, cfg};

  double a = s_lo, b = 0.0, fa = 0.0, fb = 0.0;
  if (delta > 1.0) {
    // 0 <= R <= 1 pins the solution inside [sigma_eff^2, sigma_eff^2/(1-1/delta)]
    b = s_lo / (1.0 - 1.0 / delta);
    fa = h(a);
    fb = h(b);
  } else {
    fa = h(a);
    b = 2.0 * a;
    fb = h(b);
    int doublings = 0;
    while (fb < 0.0 && doublings < cfg.max_bracket_doublings) {
      a = b;
      fa = fb;
      b *= 2.0;
      fb = h(b);
      ++doublings;
    }
    if (fb < 0.0)
      throw std::runtime_error(
          "solve: no sign change found while expanding the fixed-point bracket (delta <= 1, "
          "reached s = " +
          std::to_string(b) + " after " + std::to_string(doublings) + " doublings)");
  }

  const double ftol = std::min(cfg.fp_tol, 1e-11 / delta);
  double s = 0.0;
  if (fa >= 0.0) {
    s = a;  // degenerate bracket: R numerically equal to its bound
  } else if (fb <= 0.0) {
    s = b;
  } else {
    s = brent_root(h, a, b, fa, fb, 1e-13, ftol, cfg.max_root_iters);
  }

  out.sigma_bar = std::sqrt(s);
  const RiskPoint star = h.chi_solution(out.sigma_bar);
  out.chi_star = star.chi;
  out.amse = s * star.risk;
  out.residual = s - s_lo - s * star.risk / delta;
  out.iterations = h.evals;
  return out;
}

std::vector<CurvePoint> amse_delta_curve(const RiskEvaluator& evaluator, double q,
                                         const std::vector<double>& deltas, double sigma_w,
                                         bool scaled, const SEConfig& cfg) {
  std::vector<CurvePoint> out(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    try {
      out[i].outcome = solve(evaluator, q, deltas[i], sigma_w, scaled, cfg);
      out[i].ok = true;
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  }
  return out;
}

std::vector<CurvePoint> amse_sigma_curve(const RiskEvaluator& evaluator, double q, double delta,
                                         const std::vector<double>& sigma_ws, bool scaled,
                                         const SEConfig& cfg) {
  std::vector<CurvePoint> out(sigma_ws.size());
  for (std::size_t i = 0; i < sigma_ws.size(); ++i) {
    try {
      out[i].outcome = solve(evaluator, q, delta, sigma_ws[i], scaled, cfg);
      out[i].ok = true;
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  }
  return out;
}

}  // namespace bridgelab
