#pragma once

namespace bridgelab {

// Value and partial derivatives of the scalar shrinkage map
//   prox(u; chi, q) = argmin_z 0.5*(u-z)^2 + chi*|z|^q,   q in [1,2].
// q=1 is the soft threshold, q=2 linear shrinkage; in between the value
// solves x + chi*q*x^(q-1) = |u| on (0,|u|].
struct ProxResult {
  double value = 0.0;
  double d_du = 0.0;    // partial derivative in u
  double d_dchi = 0.0;  // partial derivative in chi
};

// Throws std::invalid_argument when q is outside [1,2], chi < 0, or u is not
// finite. At the q=1 kink |u| == chi the weak-derivative convention d_du = 0
// is reported.
ProxResult prox(double u, double chi, double q);

}  // namespace bridgelab
