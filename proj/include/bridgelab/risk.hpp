#pragma once

#include "bridgelab/quadrature.hpp"
#include "bridgelab/signal_dist.hpp"

namespace bridgelab {

struct QuadratureConfig {
  int hermite_nodes = 61;  // z-direction nodes (and nodes per split panel)
  int b_nodes = 200;       // magnitude-direction nodes for continuous laws
};

struct ChiSearchConfig {
  int grid_points = 64;          // coarse log grid size
  double golden_tol = 1e-10;     // relative width of the golden-section bracket
  double zero_margin = 1e-10;    // improvement below this keeps chi = 0
  int max_grid_extensions = 3;   // decades added when the argmin hits an edge
};

// One evaluation of the scalar denoising risk
//   R(chi, sigma) = E (prox(B/sigma + Z; chi, q) - B/sigma)^2,  Z ~ N(0,1),
// together with its derivative in chi.
struct RiskPoint {
  double q = 0.0;
  double chi = 0.0;
  double sigma = 0.0;
  double risk = 0.0;
  double d_risk_dchi = 0.0;
};

// Precomputes the magnitude and Gaussian quadrature rules for one signal law.
// Immutable after construction; evaluations are pure and thread-safe.
class RiskEvaluator {
 public:
  explicit RiskEvaluator(SignalDistribution dist, QuadratureConfig cfg = {});

  // Tensor-product risk. For q = 1 the Gaussian direction is integrated in
  // closed form (the soft threshold makes the inner integral elementary,
  // which a fixed Hermite rule cannot match near the kink); for q in (1,2)
  // the Gaussian panel is split at the shrinkage kink when it falls inside
  // quadrature range. Throws std::invalid_argument on bad (q, chi, sigma)
  // and std::runtime_error when the quadrature turns non-finite.
  RiskPoint risk(double q, double chi, double sigma) const;

  // Global minimizer of chi -> risk(q, chi, sigma): coarse log grid spanning
  // [1e-4 sigma^q, 10 sigma^(q-1)] plus the small-sigma rate hint, then
  // golden-section refinement and a stationarity polish on d_risk_dchi.
  // Falls back to chi = 0 when no candidate beats risk(0) = 1.
  RiskPoint optimal_chi(double q, double sigma, const ChiSearchConfig& cfg = {}) const;

  const SignalDistribution& dist() const { return dist_; }
  const QuadratureConfig& config() const { return cfg_; }

 private:
  double inner_pair(double q, double chi, double m, double* d_dchi) const;

  SignalDistribution dist_;
  QuadratureConfig cfg_;
  Quadrature b_rule_;
  Quadrature z_rule_;
  std::vector<double> panel_nodes_;    // Gauss-Legendre reference on [0,1]
  std::vector<double> panel_weights_;
};

}  // namespace bridgelab
