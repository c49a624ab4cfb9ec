#pragma once

#include <functional>
#include <vector>

namespace bridgelab {

// A fixed quadrature rule: sum_i weights[i] * f(nodes[i]) approximates an
// expectation or integral, with the measure folded into the weights.
struct Quadrature {
  enum class Kind { gauss_hermite_normal, gauss_legendre_interval, discrete_exact };

  std::vector<double> nodes;
  std::vector<double> weights;
  Kind kind = Kind::discrete_exact;

  template <class F>
  double apply(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

// n-point Gauss-Hermite rule normalized against the standard normal density:
// apply(f) ~ E f(Z), Z ~ N(0,1). Weights sum to 1.
Quadrature gauss_hermite_normal(int n);

// n-point Gauss-Legendre rule on [a,b]: apply(f) ~ integral of f over [a,b].
Quadrature gauss_legendre(int n, double a, double b);

// Reference Gauss-Legendre nodes/weights on [0,1], for callers that remap
// intervals on the fly.
void gauss_legendre_reference(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Adaptive Simpson integration of f over [a,b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-11, double abs_tol = 1e-300);

}  // namespace bridgelab
