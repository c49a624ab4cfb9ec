#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "bridgelab/signal_dist.hpp"

namespace bridgelab {

// One finite-size regression instance y = X beta + w (w scaled by
// 1/sqrt(delta) in the scaled model), X iid N(0, 1/n).
struct Instance {
  int n = 0;
  int p = 0;
  Eigen::MatrixXd X;
  Eigen::VectorXd beta;
  Eigen::VectorXd w;
  Eigen::VectorXd y;
  double sigma_w = 0.0;
  bool scaled = false;
  std::uint64_t seed = 0;
};

struct SolverConfig {
  double tol = 1e-9;       // fixed-point residual target, relative scale
  int max_iter = 50000;
  int power_iters = 50;    // Lipschitz estimation
  bool accelerate = false; // FISTA momentum; disables the monotone step control
  double lipschitz = 0.0;  // known bound on the largest squared singular value; 0 = estimate
};

struct SolveResult {
  Eigen::VectorXd beta_hat;
  double lambda = 0.0;
  double q = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;  // fixed-point residual |b - prox(b + s X'(y-Xb))| / sqrt(p)
  int iterations = 0;
  double mse = 0.0;        // |beta_hat - beta|^2 / p
  bool converged = false;
};

Instance generate(int n, int p, const SignalDistribution& dist, double sigma_w, bool scaled,
                  std::uint64_t seed);

// Proximal gradient descent on 0.5|y - X b|^2 + lambda |b|_q^q with fixed
// step 1/L. Monotone by default: a non-decreasing step is retried once at
// half length and then accepted. Non-convergence is reported through the
// `converged` flag with the best iterate retained.
SolveResult solve_lqls(const Instance& inst, double lambda, double q,
                       const SolverConfig& cfg = {});

struct SweepResult {
  SolveResult best;
  std::vector<SolveResult> curve;  // in the order of the input grid
};

// Solves along the grid in descending-lambda order with warm starts and
// returns the minimum-mse entry.
SweepResult lambda_sweep(const Instance& inst, double q, const std::vector<double>& lambdas,
                         const SolverConfig& cfg = {});

// Direct ridge solution (X'X + 2 lambda I)^{-1} X'y, the linear-algebra
// counterpart of solve_lqls at q = 2.
Eigen::VectorXd ridge_direct(const Instance& inst, double lambda);

double objective_value(const Instance& inst, const Eigen::VectorXd& beta_hat, double lambda,
                       double q);

}  // namespace bridgelab
