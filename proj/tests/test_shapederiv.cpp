#include <doctest.h>

#include <cmath>

#include "clamped/domain.hpp"
#include "clamped/shapederiv.hpp"

using namespace clamped;

namespace {

// Disk with a flat cut and a notch: no symmetry that would force a zero
// translation derivative on the lattice.
DomainSpec lopsided(int n) {
  DomainSpec s;
  s.shape = "mask";
  s.h = 2.0 / n;
  for (int j = -n / 2; j <= n / 2; ++j) {
    std::vector<int> row;
    for (int i = -n / 2; i <= n / 2; ++i) {
      const double x = i * s.h, y = j * s.h;
      const bool in = x * x + y * y < 1.0 && x < 0.7 && !(y > 0.3 && std::abs(x + 0.2) < 0.15);
      row.push_back(in ? 1 : 0);
    }
    s.rows.push_back(row);
  }
  return s;
}

}  // namespace

TEST_CASE("volume derivative: boundary flux against re-masked areas") {
  const DomainSpec disk = DomainSpec::disk(1.0, 128);
  const VolumeDerivative dil = volume_derivative(disk, VectorFieldSpec::dilation());
  CHECK(dil.exact == doctest::Approx(2.0 * M_PI).epsilon(0.03));
  CHECK(dil.finite_difference == doctest::Approx(2.0 * M_PI).epsilon(0.03));
  const VolumeDerivative tr = volume_derivative(disk, VectorFieldSpec::translation(1.0, 0.0));
  CHECK(std::abs(tr.exact) < 1e-10);
  CHECK(std::abs(tr.finite_difference) < 1e-10);
  const VolumeDerivative sq = volume_derivative(DomainSpec::square(1.0, 64), VectorFieldSpec::dilation());
  // Square [0, 1]^2 dilated about the origin: d/dt (1 + t)^2 = 2.
  CHECK(sq.exact == doctest::Approx(2.0).epsilon(0.05));
  CHECK(sq.finite_difference == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("dilation: formula against exact rescaling") {
  for (const auto& spec : {DomainSpec::disk(1.0, 96), DomainSpec::square(1.0, 64)}) {
    const EigenDerivativeReport r = eigenvalue_derivative_check(spec, VectorFieldSpec::dilation());
    CHECK(r.by_rescaling);
    CHECK(r.fd_value == doctest::Approx(-4.0 * r.eigenvalue).epsilon(1e-5));
    CHECK(r.relative_discrepancy < 0.01);
  }
}

TEST_CASE("translation derivative vanishes within the lattice noise") {
  DerivativeOptions opts;
  opts.estimate_noise = true;
  const VectorFieldSpec v = VectorFieldSpec::translation(std::cos(0.3), std::sin(0.3));
  const EigenDerivativeReport r = eigenvalue_derivative_check(DomainSpec::disk(1.0, 64), v, opts);
  CHECK_FALSE(r.by_rescaling);
  CHECK(r.fd_noise > 0.0);
  CHECK(std::abs(r.fd_value) <= r.fd_noise);
  CHECK(std::abs(r.formula_value) <= r.fd_noise);
}

TEST_CASE("translating a mask is an exact lattice shift") {
  // Whole-cell shifts leave the spectrum unchanged, so the difference quotient
  // is exactly zero; the boundary formula only sees staircase error.
  double previous = INFINITY;
  for (int n : {64, 128}) {
    const EigenDerivativeReport r = eigenvalue_derivative_check(lopsided(n), VectorFieldSpec::translation(std::cos(0.3), std::sin(0.3)));
    CHECK(r.fd_value == 0.0);
    const double rel = std::abs(r.formula_value) / (4.0 * r.eigenvalue);
    MESSAGE("n=" << n << " relative translation formula " << rel);
    CHECK(rel < 0.1);
    CHECK(rel < previous);
    previous = rel;
  }
}

TEST_CASE("normal bumps on the disk") {
  const DomainSpec spec = DomainSpec::disk(1.0, 96);
  const double h = spec.spacing();
  for (double theta : {0.0, 1.3, 2.9}) {
    const EigenDerivativeReport r = eigenvalue_derivative_check(spec, VectorFieldSpec::normal_bump(theta, 0.6, 1.0));
    CHECK(r.formula_value < 0.0);
    CHECK(r.relative_discrepancy < std::max(0.1, 50.0 * h));
  }
}

TEST_CASE("G is stationary at the disk") {
  const DomainSpec spec = DomainSpec::disk(1.0, 128);
  const double h = spec.spacing();
  const VectorFieldSpec fields[] = {VectorFieldSpec::dilation(), VectorFieldSpec::translation(1.0, 0.0),
                                    VectorFieldSpec::normal_bump(0.0, 0.5, 1.0), VectorFieldSpec::normal_bump(2.0, 1.0, -0.5),
                                    VectorFieldSpec::normal_bump(4.0, 0.3, 2.0)};
  for (const auto& v : fields) {
    const GDerivativeReport g = G_derivative_check(spec, v);
    CHECK(std::abs(g.normalized) < 20.0 * h);
  }
}

TEST_CASE("boundary constancy scan") {
  const auto pair = principal_eigenpair(make_domain_ptr(DomainSpec::annulus(0.3, 1.0, 64)));
  const auto stats = boundary_constancy_scan(pair);
  REQUIRE(stats.size() == 2u);
  CHECK(stats[0].mean > 0.0);
  CHECK(stats[1].mean > 0.0);
  CHECK(stats[0].mean != doctest::Approx(stats[1].mean).epsilon(0.1));
}

TEST_CASE("derivatives are refused without a spectral gap") {
  // The square's second eigenvalue is double but the first is simple; demand
  // an impossible gap instead.
  DerivativeOptions opts;
  opts.min_relative_gap = 10.0;
  CHECK_THROWS_AS(eigenvalue_derivative_check(DomainSpec::square(1.0, 32), VectorFieldSpec::dilation(), opts), SpectralGapError);
  CHECK_THROWS_AS(G_derivative_check(DomainSpec::square(1.0, 32), VectorFieldSpec::dilation(), opts), SpectralGapError);
}

TEST_CASE("vector field parsing") {
  CHECK(parse_vector_field("dilation").kind == VectorFieldSpec::Kind::dilation);
  const auto t = parse_vector_field("translation:1,-2");
  CHECK(t.kind == VectorFieldSpec::Kind::translation);
  CHECK(t.vx == 1.0);
  CHECK(t.vy == -2.0);
  CHECK(parse_vector_field("translation").vx == doctest::Approx(std::cos(0.3)));
  const auto b = parse_vector_field("bump:0.5,0.4,2");
  CHECK(b.kind == VectorFieldSpec::Kind::normal_bump);
  CHECK(b.width == 0.4);
  CHECK_THROWS_AS(parse_vector_field("twist"), std::invalid_argument);
  CHECK_THROWS_AS(parse_vector_field("bump:1,2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_vector_field("translation:1,x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_vector_field("bump:0,4,1"), std::invalid_argument);
  double vx = 0, vy = 0;
  b.eval(std::cos(0.5), std::sin(0.5), vx, vy);
  CHECK(vx == doctest::Approx(2.0 * std::cos(0.5)));
  b.eval(std::cos(2.0), std::sin(2.0), vx, vy);
  CHECK(vx == 0.0);
}
