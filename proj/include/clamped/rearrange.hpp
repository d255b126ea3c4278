#pragma once

#include <vector>

#include "clamped/grid.hpp"

namespace clamped {

/// A rearranged field in measure coordinates: the i-th sample covers
/// [s, s + cell) with s = i * cell, cell = h^2. Total measure is ball_volume.
struct RadialProfile {
  struct Sample {
    double s = 0.0;
    double value = 0.0;
  };
  double ball_volume = 0.0;
  double cell = 0.0;
  std::vector<Sample> samples;

  /// cell * #{value > t}.
  double distribution(double t) const;
  /// sum |value|^p * cell.
  double lp_norm_pow(int p) const;
};

/// h^2 #{nodes with f > t}.
double distribution_function(const ScalarField& f, double t);

/// Nonincreasing rearrangement; throws std::invalid_argument on negative input.
RadialProfile schwarz(const ScalarField& f);

/// z^# = -(-z)^*: nondecreasing rearrangement.
RadialProfile sharp(const ScalarField& z);

/// f^dagger(s) = f_+^*(s) - f_-^*(|omega| - s).
RadialProfile talenti_dagger(const ScalarField& f);

struct PolyaSzegoResult {
  double lhs = 0.0;  // discrete Dirichlet energy on omega
  double rhs = 0.0;  // radial energy of the rearranged profile on the ball (d = 2)
  /// lhs >= (1 - tol) rhs.
  bool holds(double tol) const { return lhs >= (1.0 - tol) * rhs; }
};

/// z must not change sign; a nonpositive z is negated first. The profile is
/// taken piecewise linear in s through every n^{2/3}-th cell midpoint, flat
/// up to s = 0 and reaching 0 at s = |omega|, whose energy
///   int_B |grad v|^2 = int 4 pi s (dv/ds)^2 ds
/// is integrated exactly.
PolyaSzegoResult polya_szego_check(const ScalarField& z);

/// Radial solution of -Delta v = f on the ball of volume `ball_volume`
/// (d = 2) with v = 0 on the boundary, for f given as a profile. Uses
/// v'(r) = -(1/r) int_0^r f rho d rho and the composite trapezoid rule on
/// `points` radii. Returns v at the cell midpoints of `f`.
std::vector<double> radial_poisson(const RadialProfile& f, int points = 10000);

struct TalentiReport {
  std::vector<double> v;  // per cell, symmetrised problem
  RadialProfile u_star;
  double min_gap = 0.0;  // min_i (v_i - u*_i)
  bool holds(double tol) const { return min_gap >= -tol; }
};

/// Throws std::invalid_argument on a negative source.
TalentiReport talenti_compare(const ScalarField& f);

}  // namespace clamped
