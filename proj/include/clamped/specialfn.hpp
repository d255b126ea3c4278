#pragma once

// Bessel functions of the first kind J_nu and modified I_nu for real order
// nu >= 0 and real argument x >= 0, their positive zeros, and the first zero
// of the cross product J_nu I_{nu+1} + J_{nu+1} I_nu which fixes the
// clamped-ball eigenvalue.

namespace clamped::special {

/// Bessel order attached to a space dimension: nu = d/2 - 1.
struct Order {
  double nu = 0.0;

  static Order from_dimension(int d);
};

/// J_nu(x). Power series for small x, normalised Miller recurrence otherwise.
/// Throws std::domain_error for nu < 0 or x < 0.
double bessel_j(double nu, double x);

/// I_nu(x). Throws std::overflow_error when the result is not representable.
double bessel_i(double nu, double x);

/// e^{-x} I_nu(x); finite for every x >= 0 that fits a double exponent.
double bessel_i_scaled(double nu, double x);

/// n-th positive zero j_{nu,n} of J_nu, n >= 1.
double bessel_j_zero(double nu, int n);

/// e^{-r} (J_nu(r) I_{nu+1}(r) + J_{nu+1}(r) I_nu(r)). Same zeros as the
/// unscaled cross product, no overflow.
double cross_product(double nu, double r);

struct CrossProductZero {
  double nu = 0.0;
  double gamma = 0.0;  // first positive zero of the cross product
  double j1 = 0.0;     // j_{nu,1}
  double j2 = 0.0;     // j_{nu,2}
};

/// First positive cross-product zero for dimension d >= 2, bracketed by
/// (j_{nu,1}, j_{nu,2}). Throws std::runtime_error if the bracket does not
/// change sign.
CrossProductZero gamma_nu(int d);

}  // namespace clamped::special
