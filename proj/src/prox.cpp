#include "bridgelab/prox.hpp"

#include <cmath>
#include <stdexcept>

namespace bridgelab {

namespace {

// root of g(x) = x + chi*q*x^(q-1) - u on (0,u], u > 0, q in (1,2), chi > 0.
// g is increasing and concave with g(0+) = -u < 0 and g(u) > 0, so Newton
// from x = u stays in the bracket after at most one clipped step.
double shrink_root(double u, double chi, double q) {
  const double tol = 1e-14 * std::fmax(1.0, u);
  double lo = 0.0, hi = u;
  double x = u;
  for (int it = 0; it < 500; ++it) {
    const double xq1 = std::pow(x, q - 1.0);
    const double g = x + chi * q * xq1 - u;
    const double gp = 1.0 + chi * q * (q - 1.0) * xq1 / x;
    // both an absolute residual target and value-relative precision, so that
    // scale invariance holds in the relative sense
    if (std::abs(g) <= tol && std::abs(g) <= 1e-13 * x * gp) return x;
    if (g > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double next = x - g / gp;
    if (!(next > lo && next < hi)) {
      // geometric fallback while the root is unbounded below: roots can sit
      // hundreds of orders of magnitude under u when q approaches 1
      next = lo == 0.0 ? x / 16.0 : 0.5 * (lo + hi);
    }
    if (next == x) return x;
    x = next;
  }
  return x;
}

}  // namespace

ProxResult prox(double u, double chi, double q) {
  if (!(q >= 1.0 && q <= 2.0)) throw std::invalid_argument("prox: q must lie in [1,2]");
  if (!(chi >= 0.0)) throw std::invalid_argument("prox: chi must be >= 0");
  if (!std::isfinite(u)) throw std::invalid_argument("prox: u must be finite");

  ProxResult r;
  const double sgn = u < 0.0 ? -1.0 : 1.0;
  const double au = std::abs(u);

  if (chi == 0.0) {
    r.value = u;
    r.d_du = 1.0;
    r.d_dchi = u == 0.0 ? 0.0 : -q * std::pow(au, q - 1.0) * sgn;
    return r;
  }
  if (q == 1.0) {
    if (au > chi) {
      r.value = sgn * (au - chi);
      r.d_du = 1.0;
      r.d_dchi = -sgn;
    }
    return r;  // zero value and zero weak derivatives at and inside the kink
  }
  if (q == 2.0) {
    r.value = u / (1.0 + 2.0 * chi);
    r.d_du = 1.0 / (1.0 + 2.0 * chi);
    r.d_dchi = -2.0 * u / ((1.0 + 2.0 * chi) * (1.0 + 2.0 * chi));
    return r;
  }
  if (u == 0.0) return r;

  const double x = shrink_root(au, chi, q);
  const double denom = 1.0 + chi * q * (q - 1.0) * std::pow(x, q - 2.0);
  r.value = sgn * x;
  r.d_du = 1.0 / denom;
  r.d_dchi = -q * std::pow(x, q - 1.0) * sgn / denom;
  return r;
}

}  // namespace bridgelab
