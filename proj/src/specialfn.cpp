#include "clamped/specialfn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace clamped::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Below this argument the alternating power series for J loses at most a
// couple of digits to cancellation.
constexpr double kSeriesLimit = 4.0;

void check_args(double nu, double x, const char* who) {
  if (!(nu >= 0.0) || !(x >= 0.0)) {
    throw std::domain_error(std::string(who) + ": requires nu >= 0 and x >= 0");
  }
}

// log((x/2)^nu / Gamma(nu + 1)), the leading power of both series.
double log_leading_power(double nu, double x) {
  return nu * std::log(0.5 * x) - std::lgamma(nu + 1.0);
}

double j_series(double nu, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (k * (nu + k));
    sum += term;
    if (std::abs(term) < kEps * std::abs(sum) * 1e-2) break;
  }
  return sum * std::exp(log_leading_power(nu, x));
}

// Downward recurrence J_{m-1} = (2m/x) J_m - J_{m+1} over the orders
// nu + k, normalised with (x/2)^nu = sum_k (nu + 2k) Gamma(nu + k) / k!
// J_{nu+2k}(x).
double j_miller(double nu, double x) {
  const int start = 2 * (static_cast<int>(x + nu + 30.0 + std::sqrt(60.0 * x)) / 2 + 1);
  std::vector<double> values(static_cast<std::size_t>(start) + 2, 0.0);
  values[start + 1] = 0.0;
  values[start] = 1e-300;
  for (int k = start; k >= 1; --k) {
    const double order = nu + k;
    values[k - 1] = (2.0 * order / x) * values[k] - values[k + 1];
    if (std::abs(values[k - 1]) > 1e250) {
      for (int m = k - 1; m <= start + 1; ++m) values[m] *= 1e-250;
    }
  }
  // Normalisation sum divided by Gamma(nu + 1): ratio_m = Gamma(nu + m) /
  // (m! Gamma(nu + 1)).
  double norm = values[0];
  double ratio = 1.0;
  for (int m = 1; 2 * m <= start; ++m) {
    if (m > 1) ratio *= (nu + m - 1.0) / m;
    norm += (nu + 2.0 * m) * ratio * values[2 * m];
  }
  return values[0] / norm * std::exp(log_leading_power(nu, x));
}

// Positive-term series of I_nu with exp(log_shift) pulled out; the running
// sum is rescaled whenever it nears overflow.
double i_series(double nu, double x, double log_shift) {
  const double q = 0.25 * x * x;
  double log_scale = log_leading_power(nu, x) - log_shift;
  double term = 1.0;
  double sum = 1.0;
  constexpr double kBig = 1e200;
  const double log_big = std::log(kBig);
  for (int k = 1; k < 100000; ++k) {
    term *= q / (k * (nu + k));
    sum += term;
    if (sum > kBig) {
      sum /= kBig;
      term /= kBig;
      log_scale += log_big;
    }
    if (term < kEps * sum * 1e-2 && k > q / (nu + k)) break;
  }
  return sum * std::exp(log_scale);
}

}  // namespace

Order Order::from_dimension(int d) {
  if (d < 2) throw std::domain_error("Order::from_dimension: d must be >= 2");
  return Order{0.5 * d - 1.0};
}

double bessel_j(double nu, double x) {
  check_args(nu, x, "bessel_j");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (x < kSeriesLimit) return j_series(nu, x);
  return j_miller(nu, x);
}

double bessel_i(double nu, double x) {
  check_args(nu, x, "bessel_i");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const double value = i_series(nu, x, 0.0);
  if (!std::isfinite(value)) throw std::overflow_error("bessel_i: result overflows, use bessel_i_scaled");
  return value;
}

double bessel_i_scaled(double nu, double x) {
  check_args(nu, x, "bessel_i_scaled");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  return i_series(nu, x, x);
}

double bessel_j_zero(double nu, int n) {
  if (!(nu >= 0.0)) throw std::domain_error("bessel_j_zero: requires nu >= 0");
  if (n < 1) throw std::domain_error("bessel_j_zero: requires n >= 1");
  constexpr double kStep = 0.1;
  // J_nu is positive on (0, j_{nu,1}) and j_{nu,1} > nu.
  double lo = std::max(nu, kStep);
  double f_lo = bessel_j(nu, lo);
  int found = 0;
  while (true) {
    const double hi = lo + kStep;
    const double f_hi = bessel_j(nu, hi);
    if (f_lo == 0.0) {
      if (++found == n) return lo;
    } else if ((f_lo < 0.0) != (f_hi < 0.0) && f_hi != 0.0) {
      if (++found == n) {
        double a = lo, b = hi, fa = f_lo;
        for (int it = 0; it < 200 && b - a > 4.0 * kEps * b; ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = bessel_j(nu, mid);
          if (fm == 0.0) return mid;
          if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
          } else {
            b = mid;
          }
        }
        return 0.5 * (a + b);
      }
    }
    lo = hi;
    f_lo = f_hi;
  }
}

double cross_product(double nu, double r) {
  return bessel_j(nu, r) * bessel_i_scaled(nu + 1.0, r) + bessel_j(nu + 1.0, r) * bessel_i_scaled(nu, r);
}

CrossProductZero gamma_nu(int d) {
  const double nu = Order::from_dimension(d).nu;
  CrossProductZero out;
  out.nu = nu;
  out.j1 = bessel_j_zero(nu, 1);
  out.j2 = bessel_j_zero(nu, 2);

  double a = out.j1, b = out.j2;
  double fa = cross_product(nu, a);
  const double fb = cross_product(nu, b);
  if ((fa < 0.0) == (fb < 0.0)) {
    throw std::runtime_error("gamma_nu: cross product does not change sign on (j_{nu,1}, j_{nu,2}) for d = " +
                             std::to_string(d));
  }
  for (int it = 0; it < 200 && b - a > 4.0 * kEps * b; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = cross_product(nu, mid);
    if (fm == 0.0) {
      a = b = mid;
      break;
    }
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  out.gamma = 0.5 * (a + b);
  return out;
}

}  // namespace clamped::special
