#pragma once

#include <stdexcept>
#include <string>

namespace clamped {

/// Raised when two independent evaluations of the same quantity disagree.
class ConsistencyError : public std::runtime_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);
/// Surface measure of the unit sphere S^{d-1}.
double unit_sphere_area(int d);

/// Principal clamped eigenmode of the ball B(0, R) in R^d, L2-normalised:
///
///   u(r) = (A J_nu(k r) + B I_nu(k r)) r^{-nu},   nu = d/2 - 1,  k = gamma_nu / R,
///
/// with eigenvalue k^4. A and B follow the closed form, which makes the
/// integral of u negative; callers comparing means use absolute values.
struct BallMode {
  int d = 2;
  double radius = 1.0;
  double volume = 0.0;
  double nu = 0.0;
  double gamma = 0.0;
  double k = 0.0;
  double eigenvalue = 0.0;
  double coef_a = 0.0;
  double coef_b = 0.0;
};

BallMode make_ball_mode(int d, double volume);

double eval_u(const BallMode& mode, double r);
double eval_radial_derivative_u(const BallMode& mode, double r);
double eval_laplacian_u(const BallMode& mode, double r);

/// sqrt(4 Gamma(B) / (d |B|)), the boundary value of |Delta u| on a critical shape.
double boundary_alpha(const BallMode& mode);

/// d/dr of Delta u at r = R.
double eval_normal_derivative_of_laplacian(const BallMode& mode);

/// Integral of u^2 over the ball by adaptive radial quadrature.
double l2_norm_squared(const BallMode& mode);

struct MeanValue {
  /// sqrt(d|B|)/gamma [J_{nu+1}/J_nu - I_{nu+1}/I_nu](gamma).
  double closed_form = 0.0;
  /// The same expression divided by R^{d-2}.
  double with_radius_power = 0.0;
  /// Adaptive quadrature of u |S^{d-1}| r^{d-1} over [0, R]; authoritative.
  double quadrature = 0.0;
};

/// Integral of u over the ball, three ways. Throws ConsistencyError when the
/// closed form and the quadrature differ by more than 1e-6.
MeanValue mean_uB(const BallMode& mode);

}  // namespace clamped
