// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "clamped/ballmode.hpp"
#include "clamped/domain.hpp"
#include "clamped/fdsolver.hpp"
#include "clamped/rearrange.hpp"
#include "clamped/reduction.hpp"
#include "clamped/shapederiv.hpp"
#include "clamped/specialfn.hpp"

using namespace clamped;

namespace {

// Pinned tolerances.
constexpr double kTableTol = 5e-4;
constexpr double kTableSquaredTol = 1e-3;
constexpr double kClosedFormTol = 1e-8;
constexpr double kTableSeconds = 1.0;
constexpr double kRichardsonTol = 0.01;
constexpr double kRichardsonSeconds = 60.0;
constexpr double kAlphaTol = 1e-10;
constexpr double kTraceFactor = 10.0;      // x h
constexpr double kResidualOrder = 1.0;
constexpr double kQuotientTol = 1e-2;
constexpr double kPerturbationTol = 1e-10;
constexpr int kPerturbations = 50;
constexpr double kLpTol = 1e-12;
constexpr double kPolyaFactor = 10.0;      // x h
constexpr int kPolyaFields = 100;
constexpr double kTalentiFactor = 10.0;    // x h
constexpr int kTalentiSources = 20;
constexpr double kDilationTol = 0.01;
constexpr double kGFactor = 20.0;          // x h
constexpr double kMeanFactor = 10.0;       // x h

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %d %-28s %s  %s\n", id, name, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::map<int, EigenPair>& disk_pairs() {
  static std::map<int, EigenPair> cache;
  return cache;
}

const EigenPair& disk_pair(int n) {
  auto& cache = disk_pairs();
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, principal_eigenpair(make_domain_ptr(DomainSpec::disk(1.0, n)))).first;
  return it->second;
}

EigenPair sampled_ball_pair(int n) {
  const BallMode b = make_ball_mode(2, std::numbers::pi);
  auto d = make_domain_ptr(DomainSpec::disk(1.0, n));
  ScalarField u = ScalarField::from_function(d, [&](double x, double y) { return eval_u(b, std::hypot(x, y)); });
  u.values /= u.l2_norm();
  return {b.eigenvalue, u};
}

void criterion_table() {
  const auto t0 = Clock::now();
  const double expected[] = {0.6056, 0.5643, 0.5308, 0.5028, 0.4790, 0.4583};
  double worst = 0.0, worst_sq = 0.0, worst_cf = 0.0;
  for (int d = 4; d <= 9; ++d) {
    const MeanValue m = mean_uB(make_ball_mode(d, 1.0));
    const double v = std::abs(m.quadrature);
    const double e = expected[d - 4];
    worst = std::max(worst, std::abs(v - e));
    worst_sq = std::max(worst_sq, std::abs(v * v - e * e));
    worst_cf = std::max(worst_cf, std::abs(m.closed_form - m.quadrature));
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < kTableTol && worst_sq < kTableSquaredTol && worst_cf < kClosedFormTol && secs < kTableSeconds;
  report(1, "ball mean table", ok,
         fmt("max_err=%.2e", worst) + fmt(" max_sq_err=%.2e", worst_sq) + fmt(" closed_vs_quad=%.2e", worst_cf) +
             fmt(" time=%.3fs", secs));
}

void criterion_richardson() {
  const auto t0 = Clock::now();
  const double g1 = disk_pair(64).eigenvalue, g2 = disk_pair(128).eigenvalue, g3 = disk_pair(256).eigenvalue;
  const double secs = seconds_since(t0);
  // First order in h: staircase boundaries dominate.
  const double r12 = 2.0 * g2 - g1, r23 = 2.0 * g3 - g2;
  const double exact = std::pow(special::gamma_nu(2).gamma, 4);
  const double rel = std::abs(r23 - exact) / exact;
  report(2, "disk eigenvalue", rel < kRichardsonTol && secs < kRichardsonSeconds,
         fmt("exact=%.6f", exact) + fmt(" grid=%.4f", g1) + fmt(",%.4f", g2) + fmt(",%.4f", g3) +
             fmt(" extrap=%.4f", r23) + fmt(" (coarse %.4f)", r12) + fmt(" rel_err=%.2e", rel) + fmt(" time=%.1fs", secs));
}

void criterion_criticality() {
  double worst = 0.0;
  for (int d = 2; d <= 9; ++d) {
    const BallMode b = make_ball_mode(d, 1.0);
    const double lap = std::abs(eval_laplacian_u(b, b.radius));
    const double alpha = std::sqrt(4.0 * b.eigenvalue / (d * b.volume));
    worst = std::max(worst, std::abs(lap - alpha) / alpha);
  }
  const EigenPair& pair = disk_pair(256);
  const double h = pair.mode.domain->h();
  const CriticalityReport c = check_criticality(pair);
  report(3, "ball criticality", worst < kAlphaTol && c.is_critical(kTraceFactor * h),
         fmt("closed_form_rel_err=%.2e", worst) + fmt(" grid_max_rel_dev=%.4f", c.max_relative_deviation) +
             fmt(" threshold=%.4f", kTraceFactor * h));
}

void criterion_reduction() {
  const double r1 = reduce(sampled_ball_pair(64)).residual_pde;
  const double r2 = reduce(sampled_ball_pair(128)).residual_pde;
  const double r3 = reduce(sampled_ball_pair(256)).residual_pde;
  const double order = std::min(std::log2(r1 / r2), std::log2(r2 / r3));

  const EigenPair& pair = disk_pair(256);
  const ReductionData red = reduce(pair);
  const SignReport sign = check_sign(red);
  const bool sign_ok = !sign.g_nonnegative || sign.z_negative;

  const double exact = std::pow(special::gamma_nu(2).gamma, 4);
  const double q = variational_quotient(red.z, red.g, red.z);
  const double q_err = std::abs(q - 1.0 / std::sqrt(exact));

  std::mt19937 rng(20240601);
  std::normal_distribution<double> n01;
  const auto& d = *pair.mode.domain;
  const double scale = red.z.values.cwiseAbs().maxCoeff();
  double worst = -INFINITY;
  for (int t = 0; t < kPerturbations; ++t) {
    ScalarField w = red.z;
    const double eps = scale * std::pow(10.0, -1.0 - 3.0 * t / kPerturbations);
    for (int k = 0; k < d.interior_count(); ++k)
      if (d.ring_position(k) < 0) w.values[k] += eps * n01(rng);
    worst = std::max(worst, variational_quotient(w, red.g, red.z) - q);
  }
  const bool ok = order >= kResidualOrder && sign_ok && q_err < kQuotientTol && worst <= kPerturbationTol;
  report(4, "order reduction", ok,
         fmt("residuals=%.2e", r1) + fmt(",%.2e", r2) + fmt(",%.2e", r3) + fmt(" order=%.2f", order) +
             std::string(" g_nonneg=") + (sign.g_nonnegative ? "yes" : "no") + fmt(" z_max_off_ring=%.2e", sign.z_max_off_ring) +
             fmt(" quotient_err=%.2e", q_err) + fmt(" worst_perturbation=%.2e", worst));
}

void criterion_rearrangement() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  bool equi = true;
  double lp_err = 0.0;
  const auto disk = make_domain_ptr(DomainSpec::disk(1.0, 64));
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd v(disk->interior_count());
    for (auto& x : v) x = 2.0 * u01(rng) - 1.0;
    const ScalarField f(disk, v);
    const RadialProfile p = talenti_dagger(f);
    for (int i = 0; i < 20; ++i) {
      const double s = -1.0 + 2.0 * (i + 0.5) / 20.0;
      equi = equi && p.distribution(s) == distribution_function(f, s);
    }
    const double h2 = disk->h() * disk->h();
    const double l1 = f.values.cwiseAbs().sum() * h2, l2 = f.values.squaredNorm() * h2;
    lp_err = std::max({lp_err, std::abs(p.lp_norm_pow(1) - l1) / l1, std::abs(p.lp_norm_pow(2) - l2) / l2});
  }

  const auto small = make_domain_ptr(DomainSpec::disk(1.0, 40));
  const double ps_tol = kPolyaFactor * small->h();
  int ps_fail = 0;
  double ps_worst = INFINITY;
  std::uniform_real_distribution<double> c(-0.6, 0.6), w(1.0, 6.0);
  for (int t = 0; t < kPolyaFields; ++t) {
    const double cx = c(rng), cy = c(rng), a = w(rng), b = w(rng);
    ScalarField z = poisson_solve(ScalarField::from_function(small, [=](double x, double y) {
      return 1.0 + a * std::exp(-b * ((x - cx) * (x - cx) + (y - cy) * (y - cy)));
    }));
    z.values = -z.values;
    const PolyaSzegoResult r = polya_szego_check(z);
    ps_worst = std::min(ps_worst, r.lhs / r.rhs - 1.0);
    if (!r.holds(ps_tol)) ++ps_fail;
  }

  const auto square = make_domain_ptr(DomainSpec::square(1.0, 64));
  const double tal_tol = kTalentiFactor * square->h();
  double gap = INFINITY;
  for (int t = 0; t < kTalentiSources; ++t) {
    Eigen::VectorXd v(square->interior_count());
    for (auto& x : v) x = u01(rng);
    gap = std::min(gap, talenti_compare(ScalarField(square, v)).min_gap);
  }
  const bool ok = equi && lp_err < kLpTol && ps_fail == 0 && gap >= -tal_tol;
  report(5, "rearrangement suite", ok,
         std::string("equimeasurable=") + (equi ? "yes" : "no") + fmt(" lp_err=%.2e", lp_err) +
             " polya_failures=" + std::to_string(ps_fail) + fmt(" polya_worst_rel=%.2e", ps_worst) +
             fmt(" talenti_min_gap=%.2e", gap) + fmt(" threshold=%.3f", -tal_tol));
}

void criterion_shape() {
  const DomainSpec spec = DomainSpec::disk(1.0, 128);
  const double h = spec.spacing();
  const EigenDerivativeReport dil = eigenvalue_derivative_check(spec, VectorFieldSpec::dilation());
  const double target = -4.0 * dil.eigenvalue;
  const bool dil_ok = std::abs(dil.formula_value - dil.fd_value) < kDilationTol * std::abs(dil.fd_value) &&
                      std::abs(dil.fd_value - target) < kDilationTol * std::abs(target);

  DerivativeOptions noisy;
  noisy.estimate_noise = true;
  const EigenDerivativeReport tr =
      eigenvalue_derivative_check(spec, VectorFieldSpec::translation(std::cos(0.3), std::sin(0.3)), noisy);
  const bool tr_ok = std::abs(tr.fd_value) <= tr.fd_noise && std::abs(tr.formula_value) <= tr.fd_noise;

  const VectorFieldSpec fields[] = {VectorFieldSpec::dilation(), VectorFieldSpec::translation(1.0, 0.0),
                                    VectorFieldSpec::normal_bump(0.0, 0.5, 1.0), VectorFieldSpec::normal_bump(2.0, 1.0, -0.5),
                                    VectorFieldSpec::normal_bump(4.0, 0.3, 2.0)};
  double g_worst = 0.0;
  for (const auto& v : fields) g_worst = std::max(g_worst, std::abs(G_derivative_check(spec, v).normalized));
  const bool g_ok = g_worst < kGFactor * h;
  report(6, "shape derivative", dil_ok && tr_ok && g_ok,
         fmt("dilation formula=%.3f", dil.formula_value) + fmt(" fd=%.3f", dil.fd_value) + fmt(" -4Gamma=%.3f", target) +
             fmt(" translation fd=%.2e", tr.fd_value) + fmt(" formula=%.2e", tr.formula_value) +
             fmt(" noise=%.2e", tr.fd_noise) + fmt(" G_max=%.2e", g_worst) + fmt(" threshold=%.3f", kGFactor * h));
}

void criterion_mean() {
  const EigenPair& pair = disk_pair(256);
  const double h = pair.mode.domain->h();
  const HypothesisMReport m = check_hypothesis_M(pair, make_ball_mode(2, pair.mode.domain->area()));
  const double gap = std::abs(m.mean_u - m.mean_uB);
  report(7, "mean value equality", gap < kMeanFactor * h && m.bound_holds,
         fmt("mean_u=%.6f", m.mean_u) + fmt(" mean_uB=%.6f", m.mean_uB) + fmt(" gap=%.2e", gap) +
             fmt(" threshold=%.4f", kMeanFactor * h) + fmt(" bound=%.4f", m.upper_bound));
}

}  // namespace

int main() {
  criterion_table();
  criterion_richardson();
  criterion_criticality();
  criterion_reduction();
  criterion_rearrangement();
  criterion_shape();
  criterion_mean();
  std::printf("%s: %d of 7 criteria failed\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures == 0 ? 0 : 1;
}
