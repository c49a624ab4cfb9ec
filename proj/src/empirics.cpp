#include "bridgelab/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bridgelab/prox.hpp"
#include "bridgelab/rng.hpp"

namespace bridgelab {

Instance generate(int n, int p, const SignalDistribution& dist, double sigma_w, bool scaled,
                  std::uint64_t seed) {
  if (n < 1 || p < 1) throw std::invalid_argument("generate: n and p must be >= 1");
  if (!(sigma_w >= 0.0)) throw std::invalid_argument("generate: sigma_w must be >= 0");

  Instance inst;
  inst.n = n;
  inst.p = p;
  inst.sigma_w = sigma_w;
  inst.scaled = scaled;
  inst.seed = seed;

  Rng xrng(Rng::mix(seed, 1));
  const double col_sd = 1.0 / std::sqrt(static_cast<double>(n));
  inst.X.resize(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) inst.X(i, j) = col_sd * xrng.normal();

  const std::vector<double> coords = dist.sample(static_cast<std::size_t>(p), Rng::mix(seed, 2));
  inst.beta = Eigen::Map<const Eigen::VectorXd>(coords.data(), p);

  Rng wrng(Rng::mix(seed, 3));
  inst.w.resize(n);
  for (int i = 0; i < n; ++i) inst.w(i) = sigma_w * wrng.normal();

  const double delta = static_cast<double>(n) / static_cast<double>(p);
  const double noise_scale = scaled ? 1.0 / std::sqrt(delta) : 1.0;
  inst.y = inst.X * inst.beta + noise_scale * inst.w;
  return inst;
}

namespace {

double penalty_value(const Eigen::VectorXd& b, double lambda, double q) {
  if (lambda == 0.0) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < b.size(); ++i) acc += std::pow(std::abs(b(i)), q);
  return lambda * acc;
}

// largest squared singular value of X by power iteration, inflated 1%
double lipschitz_estimate(const Eigen::MatrixXd& X, std::uint64_t seed, int iters) {
  Rng rng(Rng::mix(seed, 4));
  Eigen::VectorXd v(X.cols());
  for (int i = 0; i < v.size(); ++i) v(i) = rng.normal();
  v.normalize();
  double lam = 1.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd u = X.transpose() * (X * v);
    lam = u.norm();
    if (lam == 0.0) return 1.0;
    v = u / lam;
  }
  return 1.01 * lam;
}

}  // namespace

double objective_value(const Instance& inst, const Eigen::VectorXd& beta_hat, double lambda,
                       double q) {
  const double rss = (inst.y - inst.X * beta_hat).squaredNorm();
  return 0.5 * rss + penalty_value(beta_hat, lambda, q);
}

namespace {

SolveResult solve_lqls_from(const Instance& inst, double lambda, double q,
                            const Eigen::VectorXd& start, const SolverConfig& cfg) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("solve_lqls: lambda must be >= 0");
  if (!(q >= 1.0 && q <= 2.0)) throw std::invalid_argument("solve_lqls: q must lie in [1,2]");

  const double L =
      cfg.lipschitz > 0.0 ? cfg.lipschitz : lipschitz_estimate(inst.X, inst.seed, cfg.power_iters);
  const double step = 1.0 / L;
  const double sqrt_p = std::sqrt(static_cast<double>(inst.p));

  Eigen::VectorXd b = start;
  Eigen::VectorXd momentum = b;  // FISTA extrapolation point
  double t_accel = 1.0;
  double objective = objective_value(inst, b, lambda, q);

  Eigen::VectorXd grad(inst.p), candidate(inst.p);
  SolveResult res;
  res.lambda = lambda;
  res.q = q;

  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    const Eigen::VectorXd& base = cfg.accelerate ? momentum : b;
    grad.noalias() = inst.X.transpose() * (inst.y - inst.X * base);
    for (int i = 0; i < inst.p; ++i)
      candidate(i) = prox(base(i) + step * grad(i), lambda * step, q).value;

    if (!cfg.accelerate) {
      double cand_obj = objective_value(inst, candidate, lambda, q);
      if (cand_obj >= objective) {
        // monotone control: retry once at half step, then accept
        const double half = 0.5 * step;
        for (int i = 0; i < inst.p; ++i)
          candidate(i) = prox(b(i) + half * grad(i), lambda * half, q).value;
        cand_obj = objective_value(inst, candidate, lambda, q);
      }
      const double move = (candidate - b).norm() / sqrt_p;
      b.swap(candidate);
      objective = cand_obj;
      res.grad_norm = move;
      if (move <= cfg.tol * (1.0 + b.norm() / sqrt_p)) {
        res.converged = true;
        ++it;
        break;
      }
    } else {
      const double move = (candidate - b).norm() / sqrt_p;
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_accel * t_accel));
      momentum = candidate + ((t_accel - 1.0) / t_next) * (candidate - b);
      t_accel = t_next;
      b.swap(candidate);
      res.grad_norm = move;
      if (move <= cfg.tol * (1.0 + b.norm() / sqrt_p)) {
        res.converged = true;
        ++it;
        break;
      }
    }
  }

  res.beta_hat = b;
  res.iterations = it;
  // the monotone path reports the objective tracked along the iteration, so
  // callers can recompute it independently as a consistency check
  res.objective = cfg.accelerate ? objective_value(inst, b, lambda, q) : objective;
  res.mse = (b - inst.beta).squaredNorm() / static_cast<double>(inst.p);
  return res;
}

}  // namespace

SolveResult solve_lqls(const Instance& inst, double lambda, double q, const SolverConfig& cfg) {
  return solve_lqls_from(inst, lambda, q, Eigen::VectorXd::Zero(inst.p), cfg);
}

SweepResult lambda_sweep(const Instance& inst, double q, const std::vector<double>& lambdas,
                         const SolverConfig& cfg) {
  if (lambdas.empty()) throw std::invalid_argument("lambda_sweep: grid must be nonempty");
  for (double l : lambdas)
    if (!(l >= 0.0)) throw std::invalid_argument("lambda_sweep: grid values must be >= 0");

  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });

  SweepResult sweep;
  sweep.curve.resize(lambdas.size());
  SolverConfig sweep_cfg = cfg;
  if (sweep_cfg.lipschitz <= 0.0)
    sweep_cfg.lipschitz = lipschitz_estimate(inst.X, inst.seed, cfg.power_iters);
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(inst.p);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t idx = order[k];
    SolveResult r = solve_lqls_from(inst, lambdas[idx], q, warm, sweep_cfg);
    warm = r.beta_hat;
    sweep.curve[idx] = std::move(r);
  }
  sweep.best = sweep.curve.front();
  for (const SolveResult& r : sweep.curve)
    if (r.mse < sweep.best.mse) sweep.best = r;
  return sweep;
}

Eigen::VectorXd ridge_direct(const Instance& inst, double lambda) {
  Eigen::MatrixXd gram = inst.X.transpose() * inst.X;
  gram.diagonal().array() += 2.0 * lambda;
  return gram.ldlt().solve(inst.X.transpose() * inst.y);
}

}  // namespace bridgelab
