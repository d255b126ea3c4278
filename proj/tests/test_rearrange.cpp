#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "clamped/domain.hpp"
#include "clamped/fdsolver.hpp"
#include "clamped/rearrange.hpp"

using namespace clamped;

namespace {

ScalarField random_field(const DomainPtr& d, std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(d->interior_count());
  for (auto& x : v) x = u(rng);
  return {d, v};
}

// Smooth positive field vanishing at the boundary: torsion-like solution of a
// random bump source.
ScalarField random_smooth_positive(const DomainPtr& d, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.6, 0.6), w(1.0, 6.0);
  const double cx = u(rng), cy = u(rng), a = w(rng), b = w(rng);
  return poisson_solve(ScalarField::from_function(d, [=](double x, double y) {
    return 1.0 + a * std::exp(-b * ((x - cx) * (x - cx) + (y - cy) * (y - cy)));
  }));
}

}  // namespace

TEST_CASE("Schwarz rearrangement is equimeasurable and nonincreasing") {
  const auto d = make_domain_ptr(DomainSpec::annulus(0.2, 1.0, 48));
  std::mt19937 rng(2);
  const ScalarField f = random_field(d, rng, 0.0, 3.0);
  const RadialProfile p = schwarz(f);
  CHECK(p.ball_volume == doctest::Approx(d->area()));
  for (std::size_t i = 1; i < p.samples.size(); ++i) CHECK(p.samples[i].value <= p.samples[i - 1].value);
  for (int k = 0; k <= 20; ++k) {
    const double t = 3.0 * k / 20.0 - 0.1;
    CHECK(p.distribution(t) == distribution_function(f, t));
  }
  for (int q : {1, 2, 3}) {
    double direct = 0.0;
    for (double x : f.values) direct += std::pow(std::abs(x), q);
    CHECK(p.lp_norm_pow(q) == doctest::Approx(direct * d->h() * d->h()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(schwarz(random_field(d, rng, -1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("rearrangement is monotone and order preserving") {
  const auto d = make_domain_ptr(DomainSpec::disk(1.0, 32));
  std::mt19937 rng(4);
  const ScalarField f = random_field(d, rng, 0.0, 1.0);
  ScalarField g = f;
  for (auto& x : g.values) x += std::abs(std::sin(x * 17.0));
  const RadialProfile pf = schwarz(f), pg = schwarz(g);
  for (std::size_t i = 0; i < pf.samples.size(); ++i) CHECK(pf.samples[i].value <= pg.samples[i].value);
}

TEST_CASE("sharp is the nondecreasing rearrangement") {
  const auto d = make_domain_ptr(DomainSpec::disk(1.0, 32));
  std::mt19937 rng(6);
  const ScalarField z = random_field(d, rng, -2.0, 0.0);
  const RadialProfile p = sharp(z);
  for (std::size_t i = 1; i < p.samples.size(); ++i) CHECK(p.samples[i].value >= p.samples[i - 1].value);
  CHECK(p.samples.front().value == z.min());
  CHECK(p.samples.back().value == z.max());
}

TEST_CASE("Talenti dagger properties") {
  const auto d = make_domain_ptr(DomainSpec::square(1.0, 30));
  std::mt19937 rng(8);
  const ScalarField f = random_field(d, rng, -1.0, 1.0);
  const RadialProfile p = talenti_dagger(f);
  const std::size_t n = p.samples.size();
  for (std::size_t i = 1; i < n; ++i) CHECK(p.samples[i].value <= p.samples[i - 1].value);
  for (std::size_t i = 0; i < n; ++i) CHECK(p.samples[i].value <= schwarz(ScalarField(d, f.values.cwiseMax(0.0))).samples[i].value);
  ScalarField neg = f;
  neg.values = -neg.values;
  const RadialProfile q = talenti_dagger(neg);
  for (std::size_t i = 0; i < n; ++i) CHECK(q.samples[i].value == -p.samples[n - 1 - i].value);
  // Integral is preserved.
  double sum = 0.0;
  for (const auto& s : p.samples) sum += s.value;
  CHECK(sum * p.cell == doctest::Approx(f.integral()).epsilon(1e-12));
  // For nonnegative input the dagger is the Schwarz rearrangement.
  const ScalarField pos(d, f.values.cwiseAbs());
  const RadialProfile a = talenti_dagger(pos), b = schwarz(pos);
  for (std::size_t i = 0; i < n; ++i) CHECK(a.samples[i].value == b.samples[i].value);
}

TEST_CASE("Polya-Szego inequality on random negative fields") {
  const auto d = make_domain_ptr(DomainSpec::disk(1.0, 40));
  const double tol = 10.0 * d->h();
  std::mt19937 rng(10);
  int failures = 0;
  for (int t = 0; t < 100; ++t) {
    ScalarField z = random_smooth_positive(d, rng);
    z.values = -z.values;
    if (!polya_szego_check(z).holds(tol)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("Polya-Szego is nearly an equality for radial fields on the disk") {
  const auto d = make_domain_ptr(DomainSpec::disk(1.0, 128));
  const ScalarField z = ScalarField::from_function(d, [](double x, double y) { return -(1.0 - x * x - y * y); });
  const PolyaSzegoResult r = polya_szego_check(z);
  // int |grad (1 - r^2)|^2 over the unit disk = 2 pi.
  CHECK(r.lhs == doctest::Approx(2.0 * M_PI).epsilon(0.03));
  CHECK(r.rhs == doctest::Approx(r.lhs).epsilon(0.03));
  CHECK_THROWS_AS(polya_szego_check(ScalarField::from_function(d, [](double x, double) { return x; })), std::invalid_argument);
}

TEST_CASE("radial Poisson solve matches the torsion function") {
  RadialProfile one;
  const int n = 4000;
  one.cell = M_PI / n;
  one.ball_volume = M_PI;
  for (int i = 0; i < n; ++i) one.samples.push_back({one.cell * i, 1.0});
  const auto v = radial_poisson(one);
  for (int i = 0; i < n; i += 97) {
    const double r2 = (one.samples[i].s + 0.5 * one.cell) / M_PI;
    CHECK(v[i] == doctest::Approx((1.0 - r2) / 4.0).epsilon(1e-6));
  }
}

TEST_CASE("Talenti comparison on the square at several resolutions") {
  for (int n : {24, 32, 48, 64, 96}) {
    const auto d = make_domain_ptr(DomainSpec::square(1.0, n));
    const TalentiReport r = talenti_compare(ScalarField::from_function(d, [](double, double) { return 1.0; }));
    const double scale = *std::max_element(r.v.begin(), r.v.end());
    CHECK(r.holds(10.0 * d->h() * scale));
  }
}

TEST_CASE("Talenti comparison for random sources and on the disk") {
  const auto d = make_domain_ptr(DomainSpec::square(1.0, 40));
  std::mt19937 rng(12);
  for (int t = 0; t < 20; ++t) {
    const ScalarField f = random_field(d, rng, 0.0, 1.0);
    const TalentiReport r = talenti_compare(f);
    const double scale = *std::max_element(r.v.begin(), r.v.end());
    CHECK(r.holds(10.0 * d->h() * scale));
  }
  const auto disk = make_domain_ptr(DomainSpec::disk(1.0, 64));
  const TalentiReport r = talenti_compare(ScalarField::from_function(disk, [](double, double) { return 1.0; }));
  CHECK(r.holds(10.0 * disk->h() * 0.25));
  CHECK_THROWS_AS(talenti_compare(ScalarField::from_function(disk, [](double x, double) { return x; })), std::invalid_argument);
}
