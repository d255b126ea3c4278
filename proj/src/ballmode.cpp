#include "clamped/ballmode.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "clamped/specialfn.hpp"

namespace clamped {

namespace {

enum class Kind { J, I };

// r^{-nu} Z_order(k r) for Z = J or I and order in {nu, nu + 1}. Close to the
// origin the quotient is a 0/0 form and is replaced by its power series.
double radial_piece(const BallMode& mode, Kind kind, double order, double r) {
  const double kr = mode.k * r;
  if (r < 1e-3 * mode.radius) {
    // (k/2)^order r^{order - nu} sum_m (+-1)^m (kr/2)^{2m} / (m! Gamma(order + m + 1))
    const double q = 0.25 * kr * kr;
    const double sign = kind == Kind::J ? -1.0 : 1.0;
    double term = 1.0 / std::tgamma(order + 1.0);
    double sum = term;
    for (int m = 1; m < 4; ++m) {
      term *= sign * q / (m * (order + m));
      sum += term;
    }
    return std::pow(0.5 * mode.k, order) * std::pow(r, order - mode.nu) * sum;
  }
  const double z = kind == Kind::J ? special::bessel_j(order, kr) : special::bessel_i(order, kr);
  return z * std::pow(r, -mode.nu);
}

void check_radius(const BallMode& mode, double r, const char* who) {
  if (!(r >= 0.0) || r > mode.radius * (1.0 + 1e-14)) {
    std::ostringstream msg;
    msg << who << ": r = " << r << " outside [0, " << mode.radius << "]";
    throw std::domain_error(msg.str());
  }
}

template <class F>
double radial_quadrature(F&& integrand, double radius) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  return gauss_kronrod<double, 15>::integrate(integrand, 0.0, radius, 20, 1e-13, &error);
}

}  // namespace

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

BallMode make_ball_mode(int d, double volume) {
  if (d < 2) throw std::domain_error("make_ball_mode: d must be >= 2");
  if (!(volume > 0.0)) throw std::domain_error("make_ball_mode: volume must be > 0");
  const auto zero = special::gamma_nu(d);

  BallMode mode;
  mode.d = d;
  mode.volume = volume;
  mode.radius = std::pow(volume / unit_ball_volume(d), 1.0 / d);
  mode.nu = zero.nu;
  mode.gamma = zero.gamma;
  mode.k = zero.gamma / mode.radius;
  mode.eigenvalue = std::pow(mode.k, 4);
  const double scale = std::pow(mode.radius, mode.nu) / std::sqrt(d * volume);
  mode.coef_a = scale / special::bessel_j(mode.nu, mode.gamma);
  mode.coef_b = -scale / special::bessel_i(mode.nu, mode.gamma);
  return mode;
}

double eval_u(const BallMode& mode, double r) {
  check_radius(mode, r, "eval_u");
  if (r == mode.radius) return 0.0;
  return mode.coef_a * radial_piece(mode, Kind::J, mode.nu, r) + mode.coef_b * radial_piece(mode, Kind::I, mode.nu, r);
}

double eval_radial_derivative_u(const BallMode& mode, double r) {
  check_radius(mode, r, "eval_radial_derivative_u");
  const double nu1 = mode.nu + 1.0;
  return mode.k * (-mode.coef_a * radial_piece(mode, Kind::J, nu1, r) + mode.coef_b * radial_piece(mode, Kind::I, nu1, r));
}

// r^{-nu} J_nu(kr) and r^{-nu} I_nu(kr) are radial eigenfunctions of the
// d-dimensional Laplacian with eigenvalues -k^2 and +k^2.
double eval_laplacian_u(const BallMode& mode, double r) {
  check_radius(mode, r, "eval_laplacian_u");
  const double k2 = mode.k * mode.k;
  return k2 * (-mode.coef_a * radial_piece(mode, Kind::J, mode.nu, r) + mode.coef_b * radial_piece(mode, Kind::I, mode.nu, r));
}

double boundary_alpha(const BallMode& mode) {
  return std::sqrt(4.0 * mode.eigenvalue / (mode.d * mode.volume));
}

double eval_normal_derivative_of_laplacian(const BallMode& mode) {
  const double k3 = mode.k * mode.k * mode.k;
  const double nu1 = mode.nu + 1.0;
  const double r = mode.radius;
  return k3 * (mode.coef_a * radial_piece(mode, Kind::J, nu1, r) + mode.coef_b * radial_piece(mode, Kind::I, nu1, r));
}

double l2_norm_squared(const BallMode& mode) {
  const double sphere = unit_sphere_area(mode.d);
  return radial_quadrature(
      [&](double r) {
        const double u = eval_u(mode, r);
        return sphere * u * u * std::pow(r, mode.d - 1);
      },
      mode.radius);
}

MeanValue mean_uB(const BallMode& mode) {
  const double g = mode.gamma;
  const double bracket = special::bessel_j(mode.nu + 1.0, g) / special::bessel_j(mode.nu, g) -
                         special::bessel_i(mode.nu + 1.0, g) / special::bessel_i(mode.nu, g);
  MeanValue out;
  out.closed_form = std::sqrt(mode.d * mode.volume) / g * bracket;
  out.with_radius_power = out.closed_form / std::pow(mode.radius, mode.d - 2);

  const double sphere = unit_sphere_area(mode.d);
  out.quadrature = radial_quadrature(
      [&](double r) { return sphere * eval_u(mode, r) * std::pow(r, mode.d - 1); }, mode.radius);

  if (std::abs(out.closed_form - out.quadrature) > 1e-6) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "mean_uB: closed form " << out.closed_form << " disagrees with quadrature " << out.quadrature
        << " (d = " << mode.d << ", volume = " << mode.volume << ")";
    throw ConsistencyError(msg.str());
  }
  return out;
}

}  // namespace clamped
