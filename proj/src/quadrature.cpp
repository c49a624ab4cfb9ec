#include "bridgelab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace bridgelab {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the orthogonal
// polynomial recurrence, weights come from the first eigenvector components.
void golub_welsch(const std::vector<double>& off_diag, double mu0,
                  std::vector<double>& nodes, std::vector<double>& weights) {
  const int n = static_cast<int>(off_diag.size()) + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = off_diag[k];
    jacobi(k + 1, k) = off_diag[k];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = mu0 * v0 * v0;
  }
}

struct RuleCache {
  std::mutex mu;
  std::map<int, Quadrature> hermite;
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> legendre01;
};

RuleCache& cache() {
  static RuleCache c;
  return c;
}

}  // namespace

Quadrature gauss_hermite_normal(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_normal: n must be >= 1");
  {
    std::lock_guard<std::mutex> lock(cache().mu);
    auto it = cache().hermite.find(n);
    if (it != cache().hermite.end()) return it->second;
  }
  // physicists' Hermite recurrence, weight exp(-x^2): off-diag sqrt(k/2)
  std::vector<double> off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(0.5 * k);
  Quadrature rule;
  golub_welsch(off, 1.0, rule.nodes, rule.weights);  // mu0 folded: weights sum to 1
  for (double& x : rule.nodes) x *= std::sqrt(2.0);  // rescale to N(0,1)
  rule.kind = Quadrature::Kind::gauss_hermite_normal;
  std::lock_guard<std::mutex> lock(cache().mu);
  cache().hermite.emplace(n, rule);
  return rule;
}

void gauss_legendre_reference(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_reference: n must be >= 1");
  {
    std::lock_guard<std::mutex> lock(cache().mu);
    auto it = cache().legendre01.find(n);
    if (it != cache().legendre01.end()) {
      nodes = it->second.first;
      weights = it->second.second;
      return;
    }
  }
  std::vector<double> off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  golub_welsch(off, 2.0, nodes, weights);  // on [-1,1], weights sum to 2
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (nodes[i] + 1.0);
    weights[i] *= 0.5;
  }
  std::lock_guard<std::mutex> lock(cache().mu);
  cache().legendre01.emplace(n, std::make_pair(nodes, weights));
}

Quadrature gauss_legendre(int n, double a, double b) {
  std::vector<double> x01, w01;
  gauss_legendre_reference(n, x01, w01);
  Quadrature rule;
  rule.kind = Quadrature::Kind::gauss_legendre_interval;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = a + (b - a) * x01[i];
    rule.weights[i] = (b - a) * w01[i];
  }
  return rule;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  const double tol = std::max(abs_tol, rel_tol * std::max(std::abs(whole), 1e-30));
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

}  // namespace bridgelab
