#include "bridgelab/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bridgelab/prox.hpp"

namespace bridgelab {

namespace {

constexpr double kPanelHalfWidth = 12.0;  // Gaussian support treated as [-12, 12]
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double normal_tail(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

// E_Z of the soft-threshold error and its chi derivative, in closed form.
// With m = b/sigma >= 0 the error splits into three Gaussian pieces:
//   z - chi on z > chi - m,  -m in the dead zone,  z + chi on z < -chi - m.
void soft_threshold_inner(double m, double chi, double& value, double& d_dchi) {
  const double qa = normal_tail(chi - m);
  const double qb = normal_tail(chi + m);
  const double pa = normal_pdf(m - chi);
  const double pb = normal_pdf(m + chi);
  value = (1.0 + chi * chi) * (qa + qb) + m * m * (normal_tail(m - chi) - normal_tail(m + chi)) -
          (m + chi) * pa + (m - chi) * pb;
  d_dchi = 2.0 * (chi * (qa + qb) - pa - pb);
}

}  // namespace

RiskEvaluator::RiskEvaluator(SignalDistribution dist, QuadratureConfig cfg)
    : dist_(std::move(dist)), cfg_(cfg) {
  if (cfg_.hermite_nodes < 2) throw std::invalid_argument("hermite_nodes must be >= 2");
  if (cfg_.b_nodes < 8) throw std::invalid_argument("b_nodes must be >= 8");
  b_rule_ = dist_.expectation_rule(cfg_.b_nodes);
  z_rule_ = gauss_hermite_normal(cfg_.hermite_nodes);
  gauss_legendre_reference(cfg_.hermite_nodes, panel_nodes_, panel_weights_);
}

// Inner Gaussian expectation of (prox(m+z) - m)^2 and of the chi-derivative
// integrand 2*(prox(m+z) - m)*d_dchi prox(m+z), for one magnitude node m.
double RiskEvaluator::inner_pair(double q, double chi, double m, double* d_dchi) const {
  if (q == 1.0) {
    double v, d;
    soft_threshold_inner(m, chi, v, d);
    if (d_dchi) *d_dchi = d;
    return v;
  }
  const bool kink_inside = q < 2.0 && chi > 0.0 && m < kPanelHalfWidth;
  double value = 0.0, deriv = 0.0;
  if (!kink_inside) {
    // smooth integrand across the Hermite span: plain Gauss-Hermite
    for (std::size_t j = 0; j < z_rule_.nodes.size(); ++j) {
      const double w = z_rule_.weights[j];
      const ProxResult p = prox(m + z_rule_.nodes[j], chi, q);
      const double err = p.value - m;
      value += w * err * err;
      deriv += w * 2.0 * err * p.d_dchi;
    }
  } else {
    // The shrinkage map loses smoothness at u = 0, and near q = 1 it also
    // steepens sharply around |u| = chi*q (the emerging soft threshold).
    // Panels: a window of width 2 on each side of the kink with nodes
    // clustered quartically toward it (plus threshold-crossing edges for
    // small q), and plain panels for the Gaussian far field.
    const double kink_window = 2.0;
    const double corner = chi * q;
    double edges[7];
    int n_edges = 0;
    edges[n_edges++] = -kPanelHalfWidth;
    if (-m - kink_window > -kPanelHalfWidth) edges[n_edges++] = -m - kink_window;
    if (q <= 1.4 && corner < kink_window) {
      if (-m - corner > -kPanelHalfWidth) edges[n_edges++] = -m - corner;
      edges[n_edges++] = -m;
      if (-m + corner < kPanelHalfWidth) edges[n_edges++] = -m + corner;
    } else {
      edges[n_edges++] = -m;
    }
    if (-m + kink_window < kPanelHalfWidth) edges[n_edges++] = -m + kink_window;
    edges[n_edges++] = kPanelHalfWidth;
    for (int piece = 0; piece + 1 < n_edges; ++piece) {
      const double a = edges[piece], b = edges[piece + 1];
      if (!(b > a)) continue;
      const double width = b - a;
      const bool near_kink = a >= -m - kink_window - 1e-12 && b <= -m + kink_window + 1e-12;
      const bool from_right = b <= -m + 1e-300;
      for (std::size_t j = 0; j < panel_nodes_.size(); ++j) {
        double z, w;
        if (near_kink) {
          const double t = panel_nodes_[j];
          const double t3 = t * t * t;
          z = from_right ? b - width * t3 * t : a + width * t3 * t;
          w = panel_weights_[j] * width * 4.0 * t3;
        } else {
          z = a + width * panel_nodes_[j];
          w = panel_weights_[j] * width;
        }
        w *= normal_pdf(z);
        const ProxResult p = prox(m + z, chi, q);
        const double err = p.value - m;
        value += w * err * err;
        deriv += w * 2.0 * err * p.d_dchi;
      }
    }
  }
  if (d_dchi) *d_dchi = deriv;
  return value;
}

RiskPoint RiskEvaluator::risk(double q, double chi, double sigma) const {
  if (!(sigma > 0.0)) throw std::invalid_argument("risk: sigma must be positive");
  if (!(chi >= 0.0)) throw std::invalid_argument("risk: chi must be >= 0");
  if (!(q >= 1.0 && q <= 2.0)) throw std::invalid_argument("risk: q must lie in [1,2]");

  RiskPoint out;
  out.q = q;
  out.chi = chi;
  out.sigma = sigma;
  for (std::size_t i = 0; i < b_rule_.nodes.size(); ++i) {
    double d = 0.0;
    const double v = inner_pair(q, chi, b_rule_.nodes[i] / sigma, &d);
    out.risk += b_rule_.weights[i] * v;
    out.d_risk_dchi += b_rule_.weights[i] * d;
  }
  if (!std::isfinite(out.risk) || !std::isfinite(out.d_risk_dchi))
    throw std::runtime_error("risk: quadrature produced a non-finite value");
  return out;
}

RiskPoint RiskEvaluator::optimal_chi(double q, double sigma, const ChiSearchConfig& cfg) const {
  if (!(sigma > 0.0)) throw std::invalid_argument("optimal_chi: sigma must be positive");

  const RiskPoint at_zero = risk(q, 0.0, sigma);

  // coarse grid bounds from the known optimal-threshold rates
  double lo = 1e-4 * std::pow(sigma, q);
  double hi = 10.0 * std::pow(sigma, q - 1.0);
  if (hi <= lo) hi = lo * 1e6;

  std::vector<double> grid;
  const int n = std::max(cfg.grid_points, 4);
  for (int extensions = 0;; ++extensions) {
    grid.clear();
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
      grid.push_back(std::exp(llo + (lhi - llo) * i / static_cast<double>(n - 1)));
    if (q > 1.0) {
      const double m_small = dist_.moment(q - 2.0);
      const double m_large = dist_.moment(2.0 * q - 2.0);
      if (std::isfinite(m_small) && std::isfinite(m_large) && m_large > 0.0) {
        const double hint = (q - 1.0) * m_small / (q * m_large) * std::pow(sigma, q);
        if (hint > 0.0) grid.push_back(hint);
      }
    }
    std::sort(grid.begin(), grid.end());

    std::size_t best = 0;
    double best_risk = risk(q, grid[0], sigma).risk;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double r = risk(q, grid[i], sigma).risk;
      if (r < best_risk) {
        best_risk = r;
        best = i;
      }
    }
    if (best_risk >= at_zero.risk - cfg.zero_margin) return at_zero;
    const bool at_edge = (best == 0) || (best + 1 == grid.size());
    if (at_edge && extensions < cfg.max_grid_extensions) {
      if (best == 0) lo /= 10.0;
      if (best + 1 == grid.size()) hi *= 10.0;
      continue;
    }

    // golden-section in log chi between the argmin's neighbors
    double la = std::log(grid[best == 0 ? 0 : best - 1]);
    double lb = std::log(grid[std::min(best + 1, grid.size() - 1)]);
    const double ratio = 0.6180339887498949;
    double lc = lb - ratio * (lb - la);
    double ld = la + ratio * (lb - la);
    double fc = risk(q, std::exp(lc), sigma).risk;
    double fd = risk(q, std::exp(ld), sigma).risk;
    while (lb - la > cfg.golden_tol) {
      if (fc < fd) {
        lb = ld;
        ld = lc;
        fd = fc;
        lc = lb - ratio * (lb - la);
        fc = risk(q, std::exp(lc), sigma).risk;
      } else {
        la = lc;
        lc = ld;
        fc = fd;
        ld = la + ratio * (lb - la);
        fd = risk(q, std::exp(ld), sigma).risk;
      }
    }
    double chi_star = std::exp(0.5 * (la + lb));

    // stationarity polish: bisect d_risk_dchi across the final bracket
    double a = std::exp(la), b = std::exp(lb);
    double da = risk(q, a, sigma).d_risk_dchi;
    double db = risk(q, b, sigma).d_risk_dchi;
    if (da < 0.0 && db > 0.0) {
      for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double dm = risk(q, mid, sigma).d_risk_dchi;
        if (dm < 0.0) {
          a = mid;
          da = dm;
        } else {
          b = mid;
          db = dm;
        }
      }
      chi_star = 0.5 * (a + b);
    }

    RiskPoint res = risk(q, chi_star, sigma);
    if (res.risk >= at_zero.risk - cfg.zero_margin) return at_zero;
    return res;
  }
}

}  // namespace bridgelab
