#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bridgelab/signal_dist.hpp"

namespace bridgelab {

// Requested closed form does not exist for these parameters (wrong regime or
// divergent moment), as opposed to a malformed argument.
class inapplicable_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Validity { valid, lasso_bracket_only, inapplicable };

std::string to_string(Validity v);

// First- and second-order behaviour of the optimally tuned error, either in
// the small-noise regime (first term sigma_w^2/(1-1/delta)) or in the
// large-sample scaled regime (first term sigma_w^2/delta). For q = 1 on laws
// with mass at zero only the decay exponent is known, so second_term carries
// a pure power and validity = lasso_bracket_only.
struct ExpansionReport {
  double q = 0.0;
  double delta = 0.0;
  double sigma_w = 0.0;
  double first_term = 0.0;
  double second_term = 0.0;
  Validity validity = Validity::inapplicable;
  std::optional<double> cq;
  std::string notes;
};

// sigma_w^2/(1 - 1/delta); throws inapplicable_error for delta <= 1.
double ols_amse(double delta, double sigma_w);

// Closed-form optimally characterized ridge error at penalty lambda:
//   amse = delta (4 chi^2 E|B|^2 + sigma_w^2) / (delta (1+2 chi)^2 - 1),
//   chi  = (1 - delta + 2 lambda delta + sqrt((delta-1-2 lambda delta)^2
//          + 8 lambda delta^2)) / (4 delta).
// Throws inapplicable_error when the denominator is not positive.
double ridge_amse_closed(double lambda, double delta, double sigma_w,
                         const SignalDistribution& dist);

struct RidgeMin {
  double lambda = 0.0;
  double amse = 0.0;
};

// Minimum of ridge_amse_closed over a log-lambda grid (default 200 points),
// refined by golden section between the bracketing grid neighbors.
RidgeMin ridge_lambda_min(double delta, double sigma_w, const SignalDistribution& dist,
                          int grid_points = 200, double lambda_lo = 1e-6,
                          double lambda_hi = 100.0);

ExpansionReport small_noise_expansion(double q, double delta, double sigma_w,
                                      const SignalDistribution& dist);
ExpansionReport large_delta_expansion(double q, double delta, double sigma_w,
                                      const SignalDistribution& dist);

// C_q = (q-1)^2 (E|B|^{q-2})^2 / E|B|^{2q-2}, the constant ranking penalties
// by their second-order gain. Throws inapplicable_error on divergent moments
// and std::invalid_argument for q outside (1,2].
double cq(double q, const SignalDistribution& dist);

struct QStarGridConfig {
  int grid_points = 200;
  double q_min = 1.0 + 1e-3;  // C_q is defined on the open interval (1,2]
};

struct QStarResult {
  double q_star = 0.0;
  std::vector<std::pair<double, double>> curve;  // (q, cq) over applicable grid points
  std::vector<double> skipped;                   // grid points with divergent moments
};

// argmax of cq over (1,2]: grid scan plus golden refinement for interior
// maxima. Throws inapplicable_error when the whole grid is inapplicable.
QStarResult q_star(const SignalDistribution& dist, const QStarGridConfig& cfg = {});

}  // namespace bridgelab
