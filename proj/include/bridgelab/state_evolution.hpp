#pragma once

#include <string>
#include <vector>

#include "bridgelab/risk.hpp"

namespace bridgelab {

struct SEConfig {
  double fp_tol = 1e-12;           // residual tolerance, relative to max(1, sigma_bar^2)
  int max_bracket_doublings = 60;  // upper-bracket search cap for delta <= 1
  int max_root_iters = 200;
  bool force_chi_zero = false;     // pins chi = 0 (pure least-squares risk R = 1)
  ChiSearchConfig chi_search;
};

// Solution of the fixed point
//   sigma_bar^2 = sigma_eff^2 + sigma_bar^2 * R(chi*(sigma_bar), sigma_bar) / delta
// with sigma_eff = sigma_w (standard model) or sigma_w/sqrt(delta) (scaled),
// and the resulting mean square error amse = sigma_bar^2 * R.
struct SEOutcome {
  double q = 0.0;
  double delta = 0.0;
  double sigma_w = 0.0;
  bool scaled = false;
  double sigma_bar = 0.0;
  double chi_star = 0.0;
  double amse = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

// Throws std::invalid_argument on bad parameters (delta <= 0, sigma_w < 0,
// q outside [1,2], or sigma_w == 0 with delta <= 1) and std::runtime_error
// when no bracket for the fixed point is found within the doubling cap.
SEOutcome solve(const RiskEvaluator& evaluator, double q, double delta, double sigma_w,
                bool scaled = false, const SEConfig& cfg = {});

struct CurvePoint {
  SEOutcome outcome;
  bool ok = false;
  std::string error;
};

// Grid sweeps; per-point failures are captured without aborting the sweep.
std::vector<CurvePoint> amse_delta_curve(const RiskEvaluator& evaluator, double q,
                                         const std::vector<double>& deltas, double sigma_w,
                                         bool scaled = false, const SEConfig& cfg = {});
std::vector<CurvePoint> amse_sigma_curve(const RiskEvaluator& evaluator, double q, double delta,
                                         const std::vector<double>& sigma_ws, bool scaled = false,
                                         const SEConfig& cfg = {});

}  // namespace bridgelab
