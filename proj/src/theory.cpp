#include "bridgelab/theory.hpp"

#include <cmath>
#include <limits>

namespace bridgelab {

namespace {

constexpr double kQEdgeGuard = 1e-3;  // q in (1, 1+guard) is flagged, not extrapolated

// applicability of the sigma_w^4-order (resp. delta^-2-order) term for
// q in (1,2]: moments finite, and for laws with mass at zero the near-zero
// CDF exponent must exceed 2-q
struct SecondOrderTerms {
  bool ok = false;
  double cq_value = 0.0;
  std::string reason;
};

SecondOrderTerms second_order_terms(double q, const SignalDistribution& dist) {
  SecondOrderTerms t;
  const double m_small = dist.moment(q - 2.0);
  const double m_large = dist.moment(2.0 * q - 2.0);
  if (!std::isfinite(m_small)) {
    t.reason = "E|B|^(q-2) diverges";
    return t;
  }
  if (!std::isfinite(m_large) || m_large <= 0.0) {
    t.reason = "E|B|^(2q-2) unavailable";
    return t;
  }
  const auto exponent = dist.cdf_zero_exponent();
  if (exponent && q < 2.0) {
    if (!(2.0 - q < *exponent)) {
      t.reason = "near-zero mass too heavy: requires 2-q < " + std::to_string(*exponent);
      return t;
    }
    if (q < 1.0 + kQEdgeGuard) {
      t.reason = "q too close to 1 for the stated tail condition";
      return t;
    }
  }
  t.ok = true;
  t.cq_value = (q - 1.0) * (q - 1.0) * m_small * m_small / m_large;
  return t;
}

}  // namespace

std::string to_string(Validity v) {
  switch (v) {
    case Validity::valid:
      return "valid";
    case Validity::lasso_bracket_only:
      return "lasso-bracket-only";
    default:
      return "inapplicable";
  }
}

double ols_amse(double delta, double sigma_w) {
  if (!(delta > 1.0)) throw inapplicable_error("ols_amse: requires delta > 1");
  return sigma_w * sigma_w / (1.0 - 1.0 / delta);
}

double ridge_amse_closed(double lambda, double delta, double sigma_w,
                         const SignalDistribution& dist) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("ridge_amse_closed: lambda must be >= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("ridge_amse_closed: delta must be positive");
  const double a = delta - 1.0 - 2.0 * lambda * delta;
  const double chi = (-a + std::sqrt(a * a + 8.0 * lambda * delta * delta)) / (4.0 * delta);
  const double denom = delta * (1.0 + 2.0 * chi) * (1.0 + 2.0 * chi) - 1.0;
  if (!(denom > 0.0))
    throw inapplicable_error("ridge_amse_closed: denominator nonpositive (delta too small)");
  return delta * (4.0 * chi * chi * dist.second_moment() + sigma_w * sigma_w) / denom;
}

RidgeMin ridge_lambda_min(double delta, double sigma_w, const SignalDistribution& dist,
                          int grid_points, double lambda_lo, double lambda_hi) {
  if (grid_points < 4) throw std::invalid_argument("ridge_lambda_min: grid too small");
  const double llo = std::log(lambda_lo), lhi = std::log(lambda_hi);
  const auto value = [&](double loglam) {
    return ridge_amse_closed(std::exp(loglam), delta, sigma_w, dist);
  };

  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> logs(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    logs[i] = llo + (lhi - llo) * i / static_cast<double>(grid_points - 1);
    const double v = value(logs[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }

  double la = logs[best == 0 ? 0 : best - 1];
  double lb = logs[std::min(best + 1, grid_points - 1)];
  const double ratio = 0.6180339887498949;
  double lc = lb - ratio * (lb - la);
  double ld = la + ratio * (lb - la);
  double fc = value(lc), fd = value(ld);
  while (lb - la > 1e-12) {
    if (fc < fd) {
      lb = ld;
      ld = lc;
      fd = fc;
      lc = lb - ratio * (lb - la);
      fc = value(lc);
    } else {
      la = lc;
      lc = ld;
      fc = fd;
      ld = la + ratio * (lb - la);
      fd = value(ld);
    }
  }
  RidgeMin out;
  out.lambda = std::exp(0.5 * (la + lb));
  out.amse = value(0.5 * (la + lb));
  if (best_val < out.amse) {
    out.lambda = std::exp(logs[best]);
    out.amse = best_val;
  }
  return out;
}

ExpansionReport small_noise_expansion(double q, double delta, double sigma_w,
                                      const SignalDistribution& dist) {
  if (!(delta > 1.0)) throw inapplicable_error("small_noise_expansion: requires delta > 1");
  if (!(sigma_w > 0.0))
    throw std::invalid_argument("small_noise_expansion: sigma_w must be positive");
  if (!(q >= 1.0 && q <= 2.0))
    throw std::invalid_argument("small_noise_expansion: q must lie in [1,2]");

  ExpansionReport rep;
  rep.q = q;
  rep.delta = delta;
  rep.sigma_w = sigma_w;
  rep.first_term = sigma_w * sigma_w / (1.0 - 1.0 / delta);

  const auto exponent = dist.cdf_zero_exponent();
  const double d3 = std::pow(delta, 3) / std::pow(delta - 1.0, 3);

  if (q == 1.0) {
    if (!exponent) {
      rep.validity = Validity::valid;
      rep.second_term = 0.0;
      rep.notes = "exponentially small second-order correction (magnitudes bounded away from 0)";
    } else {
      rep.validity = Validity::lasso_bracket_only;
      rep.second_term = -std::pow(sigma_w, 2.0 * *exponent + 2.0);
      rep.notes = "decay exponent 2l+2 = " + std::to_string(2.0 * *exponent + 2.0) +
                  "; constant and iterated-log factors undetermined";
    }
    return rep;
  }

  const SecondOrderTerms t = second_order_terms(q, dist);
  if (!t.ok) {
    rep.validity = Validity::inapplicable;
    rep.notes = t.reason;
    return rep;
  }
  rep.validity = Validity::valid;
  rep.cq = t.cq_value;
  rep.second_term = -d3 * t.cq_value * std::pow(sigma_w, 4);
  return rep;
}

ExpansionReport large_delta_expansion(double q, double delta, double sigma_w,
                                      const SignalDistribution& dist) {
  if (!(delta > 1.0)) throw inapplicable_error("large_delta_expansion: requires delta > 1");
  if (!(sigma_w > 0.0))
    throw std::invalid_argument("large_delta_expansion: sigma_w must be positive");
  if (!(q >= 1.0 && q <= 2.0))
    throw std::invalid_argument("large_delta_expansion: q must lie in [1,2]");

  ExpansionReport rep;
  rep.q = q;
  rep.delta = delta;
  rep.sigma_w = sigma_w;
  rep.first_term = sigma_w * sigma_w / delta;

  const double sw2 = sigma_w * sigma_w;
  const auto exponent = dist.cdf_zero_exponent();

  if (q == 1.0) {
    if (!exponent) {
      // the risk deficit is exponentially small, leaving only the
      // sigma_bar^2-order feedback of the fixed point
      rep.validity = Validity::valid;
      rep.second_term = sw2 / (delta * delta);
      rep.notes = "second order carries no shrinkage gain (magnitudes bounded away from 0)";
    } else if (*exponent < 1.0) {
      rep.validity = Validity::lasso_bracket_only;
      rep.second_term = -std::pow(delta, -*exponent - 1.0);
      rep.notes = "decay exponent -l-1 = " + std::to_string(-*exponent - 1.0) +
                  "; constant and iterated-log factors undetermined";
    } else {
      rep.validity = Validity::inapplicable;
      rep.notes = "stated only for near-zero CDF exponents l in (0,1)";
    }
    return rep;
  }

  const SecondOrderTerms t = second_order_terms(q, dist);
  if (!t.ok) {
    rep.validity = Validity::inapplicable;
    rep.notes = t.reason;
    return rep;
  }
  rep.validity = Validity::valid;
  rep.cq = t.cq_value;
  rep.second_term = (sw2 / (delta * delta)) * (1.0 - t.cq_value * sw2);
  return rep;
}

double cq(double q, const SignalDistribution& dist) {
  if (!(q > 1.0 && q <= 2.0)) throw std::invalid_argument("cq: q must lie in (1,2]");
  const double m_small = dist.moment(q - 2.0);
  const double m_large = dist.moment(2.0 * q - 2.0);
  if (!std::isfinite(m_small) || !std::isfinite(m_large))
    throw inapplicable_error("cq: divergent moment at q = " + std::to_string(q));
  return (q - 1.0) * (q - 1.0) * m_small * m_small / m_large;
}

QStarResult q_star(const SignalDistribution& dist, const QStarGridConfig& cfg) {
  if (cfg.grid_points < 8) throw std::invalid_argument("q_star: grid too small");
  QStarResult out;
  std::ptrdiff_t best = -1;
  double best_val = 0.0;
  for (int i = 0; i < cfg.grid_points; ++i) {
    const double q =
        cfg.q_min + (2.0 - cfg.q_min) * i / static_cast<double>(cfg.grid_points - 1);
    try {
      const double v = cq(q, dist);
      out.curve.emplace_back(q, v);
      if (best < 0 || v > best_val) {
        best = static_cast<std::ptrdiff_t>(out.curve.size()) - 1;
        best_val = v;
        out.q_star = q;
      }
    } catch (const inapplicable_error&) {
      out.skipped.push_back(q);
    }
  }
  if (best < 0) throw inapplicable_error("q_star: cq inapplicable on the whole grid");

  // endpoint maxima are reported exactly; interior ones get golden refinement
  // (the refinement interval stays between applicable curve points)
  if (best + 1 == static_cast<std::ptrdiff_t>(out.curve.size())) {
    if (out.curve[best].first == 2.0) out.q_star = 2.0;
    return out;
  }
  if (best == 0) return out;

  double a = out.curve[best - 1].first, b = out.curve[best + 1].first;
  const double ratio = 0.6180339887498949;
  const auto neg = [&](double q) { return -cq(q, dist); };
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = neg(c), fd = neg(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = neg(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = neg(d);
    }
  }
  out.q_star = 0.5 * (a + b);
  return out;
}

}  // namespace bridgelab
