#include "clamped/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace clamped {

namespace {

constexpr int kDim = 2;

double norm_on(const Eigen::VectorXd& v, const std::vector<int>& nodes) {
  double s = 0.0;
  for (int k : nodes) s += v[k] * v[k];
  return std::sqrt(s);
}

double relative_residual(const Eigen::VectorXd& r, const Eigen::VectorXd& field, const std::vector<int>& nodes) {
  const double denom = norm_on(field, nodes);
  if (!(denom > 0.0)) return 0.0;
  return norm_on(r, nodes) / denom;
}

void require_mode(const EigenPair& pair) {
  if (!pair.mode.domain) throw std::invalid_argument("eigenpair has no domain");
  if (!(pair.eigenvalue > 0.0)) throw std::invalid_argument("eigenpair: eigenvalue must be positive");
  if (!(pair.mode.values.norm() > 0.0)) throw std::invalid_argument("eigenpair: zero mode is not an eigenfunction");
}

double alpha_of(const EigenPair& pair) {
  return std::sqrt(4.0 * pair.eigenvalue / (kDim * pair.mode.domain->area()));
}

// Sum over faces of h (e . n): the length of the boundary the staircase
// approximates.
double boundary_length(const GridDomain& d) {
  double total = 0.0;
  for (const auto& f : d.faces()) {
    const auto& r = d.ring()[f.ring];
    total += d.h() * (f.di * r.nx + f.dj * r.ny);
  }
  return total;
}

}  // namespace

std::vector<int> core_nodes(const GridDomain& d) {
  std::vector<int> out;
  for (int k = 0; k < d.interior_count(); ++k) {
    if (d.ring_position(k) >= 0) continue;
    const auto p = d.node(k);
    const int nbrs[4] = {d.index_of(p.i + 1, p.j), d.index_of(p.i - 1, p.j), d.index_of(p.i, p.j + 1),
                         d.index_of(p.i, p.j - 1)};
    bool ok = true;
    for (int n : nbrs) ok = ok && d.ring_position(n) < 0;
    if (ok) out.push_back(k);
  }
  return out;
}

ReductionData reduce(const EigenPair& pair, bool exact_g) {
  require_mode(pair);
  const DomainPtr& domain = pair.mode.domain;
  const double mu = pair.eigenvalue;
  const double root = std::sqrt(mu);
  const Eigen::VectorXd& u = pair.mode.values;
  const SparseMatrix lap = laplacian_matrix(*domain);
  const Eigen::VectorXd lu = lap * u;

  ReductionData out;
  out.mu = mu;
  out.exact_g = exact_g;
  if (exact_g) {
    const double c = std::sqrt(4.0 / (kDim * domain->area()));
    out.g = ScalarField(domain, Eigen::VectorXd::Constant(domain->interior_count(), c));
  } else {
    // Ring data Delta u / sqrt(mu) + u makes z vanish on the ring exactly; u is
    // O(h^2) there, so this is the same boundary trace in the limit.
    RingValues data = ring_laplacian(pair.mode) / root;
    for (std::size_t r = 0; r < domain->ring().size(); ++r) data[static_cast<Eigen::Index>(r)] += u[domain->ring()[r].node];
    out.g = harmonic_extension(domain, data);
  }
  const Eigen::VectorXd& g = out.g.values;
  out.z = ScalarField(domain, lu / root + u - g);
  out.z_prime = ScalarField(domain, lu / root - u - g);

  const auto core = core_nodes(*domain);
  const Eigen::VectorXd rz = lap * out.z.values - root * (out.z.values + g);
  out.residual_pde = relative_residual(rz, out.z.values, core);
  const Eigen::VectorXd rzp = lap * out.z_prime.values + root * (out.z_prime.values + g);
  out.residual_z_prime = relative_residual(rzp, out.z_prime.values, core);
  out.residual_quotient = std::abs(root * variational_quotient(out.z, out.g, out.z) - 1.0);
  return out;
}

double dirichlet_energy(const ScalarField& z) {
  // Every lattice edge with at least one interior end, once.
  const auto& d = *z.domain;
  double s = 0.0;
  for (int k = 0; k < d.interior_count(); ++k) {
    const auto p = d.node(k);
    const int steps[2][2] = {{1, 0}, {0, 1}};
    for (const auto& st : steps) {
      const int fwd = d.index_of(p.i + st[0], p.j + st[1]);
      const double diff = (fwd >= 0 ? z.values[fwd] : 0.0) - z.values[k];
      s += diff * diff;
      if (d.index_of(p.i - st[0], p.j - st[1]) < 0) s += z.values[k] * z.values[k];
    }
  }
  return s;
}

double variational_quotient(const ScalarField& z, const ScalarField& g, const ScalarField& z_ref) {
  if (z.values.size() != g.values.size() || z.values.size() != z_ref.values.size()) {
    throw std::invalid_argument("variational_quotient: field sizes differ");
  }
  const double grad = dirichlet_energy(z);
  if (!(grad > 0.0)) throw std::invalid_argument("variational_quotient: zero gradient");
  const double num = z.values.squaredNorm() + g.values.dot(2.0 * z.values - z_ref.values);
  const double h2 = z.domain->h() * z.domain->h();
  return -num / (grad / h2);
}

double reduced_energy(const ScalarField& z, const ScalarField& g, double mu) {
  const double h2 = z.domain->h() * z.domain->h();
  return dirichlet_energy(z) + std::sqrt(mu) * h2 * (z.values.squaredNorm() + 2.0 * g.values.dot(z.values));
}

SignReport check_sign(const ReductionData& data) {
  const auto& d = *data.z.domain;
  SignReport r;
  r.g_min = data.g.min();
  r.g_nonnegative = r.g_min >= 0.0;
  r.z_max_off_ring = -INFINITY;
  for (int k = 0; k < d.interior_count(); ++k) {
    if (d.ring_position(k) >= 0) continue;
    r.z_max_off_ring = std::max(r.z_max_off_ring, data.z.values[k]);
    if (data.z.values[k] >= 0.0) ++r.nonnegative_count;
  }
  r.z_negative = r.nonnegative_count == 0;
  return r;
}

std::vector<ComponentStats> component_stats(const GridDomain& d, const RingValues& values, double reference) {
  std::map<int, std::vector<double>> groups;
  for (std::size_t r = 0; r < d.ring().size(); ++r) groups[d.ring()[r].component].push_back(values[static_cast<Eigen::Index>(r)]);
  std::vector<ComponentStats> out;
  for (const auto& [component, v] : groups) {
    ComponentStats s;
    s.component = component;
    s.count = static_cast<int>(v.size());
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    for (double x : v) s.mean += x;
    s.mean /= s.count;
    const double ref = reference != 0.0 ? reference : s.mean;
    for (double x : v) s.max_relative_deviation = std::max(s.max_relative_deviation, std::abs(x - ref) / std::abs(ref));
    out.push_back(s);
  }
  return out;
}

CriticalityReport check_criticality(const EigenPair& pair) {
  require_mode(pair);
  CriticalityReport r;
  r.alpha = alpha_of(pair);
  const RingValues trace = boundary_trace_of_laplacian(pair.mode).cwiseAbs();
  r.components = component_stats(*pair.mode.domain, trace, r.alpha);
  for (const auto& c : r.components) r.max_relative_deviation = std::max(r.max_relative_deviation, c.max_relative_deviation);
  return r;
}

OverdeterminedReport check_overdetermined(const EigenPair& pair) {
  require_mode(pair);
  const auto& d = *pair.mode.domain;
  OverdeterminedReport r;
  const RingValues dn = normal_derivative_of_laplacian(pair.mode);
  r.components = component_stats(d, dn);
  for (const auto& c : r.components) r.max_relative_deviation = std::max(r.max_relative_deviation, c.max_relative_deviation);
  r.flux_mean = pair.eigenvalue * pair.mode.integral() / boundary_length(d);

  const ReductionData red = reduce(pair, true);
  const RingValues dz = fit_boundary_values(red.z).normal_derivative;
  const RingValues expected = dn / std::sqrt(pair.eigenvalue);
  const double scale = expected.cwiseAbs().mean();
  r.chain_mismatch = scale > 0.0 ? (dz - expected).cwiseAbs().maxCoeff() / scale : 0.0;
  return r;
}

HypothesisMReport check_hypothesis_M(const EigenPair& pair, const BallMode& mode_b) {
  require_mode(pair);
  HypothesisMReport r;
  r.mean_u = std::abs(pair.mode.integral());
  r.mean_uB = std::abs(mean_uB(mode_b).quadrature);
  r.holds = r.mean_u <= r.mean_uB;
  r.upper_bound = std::sqrt(4.0 * pair.mode.domain->area() / kDim);
  r.bound_holds = r.mean_u <= r.upper_bound;
  return r;
}

NodalVolumeReport check_nodal_volume(const EigenPair& pair, const BallMode& mode_b) {
  require_mode(pair);
  NodalVolumeReport r;
  r.precondition_ok = pair.mode.integral() > 0.0;
  const double h = pair.mode.domain->h();
  const auto positive = (pair.mode.values.array() > 0.0).count();
  r.positive_volume = h * h * static_cast<double>(positive);
  r.sqrt_positive_volume = std::sqrt(r.positive_volume);
  r.ball_mean = std::abs(mean_uB(mode_b).quadrature);
  r.threshold = r.ball_mean * r.ball_mean;
  r.exceeds_ball_mean = r.sqrt_positive_volume > r.ball_mean;
  return r;
}

ZeroTraceReport check_zero_laplacian_trace(const EigenPair& pair) {
  require_mode(pair);
  ZeroTraceReport r;
  r.alpha = alpha_of(pair);
  r.mean_abs_trace = boundary_trace_of_laplacian(pair.mode).cwiseAbs().mean();
  r.ratio = r.mean_abs_trace / r.alpha;
  r.bounded_away = r.ratio > 0.1;
  return r;
}

}  // namespace clamped
