#pragma once

#include <vector>

#include "clamped/ballmode.hpp"
#include "clamped/fdsolver.hpp"

namespace clamped {

/// Second-order reformulation of the eigenpair (Gamma, u):
///
///   g  = harmonic off the boundary ring, g = Delta u / sqrt(mu) + u on it
///   z  = Delta u / sqrt(mu) + u - g,   Delta z  = sqrt(mu) (z + g)
///   z' = Delta u / sqrt(mu) - u - g,  -Delta z' = sqrt(mu) (z' + g)
///
/// The ring is the discrete boundary of z, where z = 0 exactly. For a grid
/// eigenpair the equation for z then holds exactly off the ring, so z is the
/// discrete minimiser of the reduced energy. Residuals are measured on core
/// nodes (whole 13-point stencil inside), relative to the field norm there.
struct ReductionData {
  double mu = 0.0;
  ScalarField g;
  ScalarField z;
  ScalarField z_prime;
  double residual_pde = 0.0;
  /// |sqrt(mu) * variational_quotient(z, g, z) - 1|.
  double residual_quotient = 0.0;
  double residual_z_prime = 0.0;
  bool exact_g = false;
};

/// With exact_g the harmonic extension is replaced by the constant
/// sqrt(4 / (d |Omega|)) that g takes on a critical shape (z then no longer
/// vanishes on the ring).
ReductionData reduce(const EigenPair& pair, bool exact_g = false);

/// -[sum z^2 + sum g (2 z - z_ref)] / sum |grad z|^2, forward differences with
/// zero extension. Throws std::invalid_argument on a vanishing gradient.
double variational_quotient(const ScalarField& z, const ScalarField& g, const ScalarField& z_ref);

/// Integral of |grad z|^2 for the zero extension of z, forward differences
/// over every lattice edge touching the interior. No h factor in 2-D.
double dirichlet_energy(const ScalarField& z);

/// E(z) = sum |grad z|^2 + sqrt(mu) sum (z^2 + 2 g z), all with h^2 weights.
double reduced_energy(const ScalarField& z, const ScalarField& g, double mu);

/// Nodes off the boundary ring whose four neighbours are off the ring too.
std::vector<int> core_nodes(const GridDomain& domain);

struct SignReport {
  double g_min = 0.0;
  bool g_nonnegative = false;
  /// Largest z over nodes off the boundary ring.
  double z_max_off_ring = 0.0;
  int nonnegative_count = 0;
  /// z < 0 off the ring. Only asserted when g_nonnegative.
  bool z_negative = false;
};

SignReport check_sign(const ReductionData& data);

struct ComponentStats {
  int component = 0;
  int count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// max |value - reference| / |reference| over the component.
  double max_relative_deviation = 0.0;
};

/// Per exterior component statistics of `values` (aligned with the ring).
/// The reference is `reference` when nonzero, the component mean otherwise.
std::vector<ComponentStats> component_stats(const GridDomain& domain, const RingValues& values, double reference = 0.0);

struct CriticalityReport {
  double alpha = 0.0;
  /// Statistics of |Delta u| on the boundary, deviation relative to alpha.
  std::vector<ComponentStats> components;
  double max_relative_deviation = 0.0;
  bool is_critical(double tol) const { return max_relative_deviation < tol; }
};

/// alpha = sqrt(4 Gamma / (2 |Omega|)).
CriticalityReport check_criticality(const EigenPair& pair);

struct OverdeterminedReport {
  /// Outward d/dn Delta u, deviation relative to each component mean.
  std::vector<ComponentStats> components;
  double max_relative_deviation = 0.0;
  /// Mean of d/dn Delta u fixed by the divergence theorem: Gamma int u / |dOmega|.
  double flux_mean = 0.0;
  /// With g constant, d/dn z = d/dn Delta u / sqrt(mu); max relative mismatch.
  double chain_mismatch = 0.0;
  bool is_constant(double tol) const { return max_relative_deviation < tol; }
};

OverdeterminedReport check_overdetermined(const EigenPair& pair);

struct HypothesisMReport {
  double mean_u = 0.0;   // |h^2 sum u|
  double mean_uB = 0.0;  // |int_B u_B|
  bool holds = false;
  double upper_bound = 0.0;  // sqrt(4 |Omega| / d)
  bool bound_holds = false;
};

/// mode_b should be the d = 2 ball mode of volume |Omega|.
HypothesisMReport check_hypothesis_M(const EigenPair& pair, const BallMode& mode_b);

struct NodalVolumeReport {
  bool precondition_ok = false;  // int u > 0
  double positive_volume = 0.0;  // h^2 #{u > 0}
  double sqrt_positive_volume = 0.0;
  double ball_mean = 0.0;  // |int_B u_B|
  double threshold = 0.0;  // ball_mean^2
  bool exceeds_ball_mean = false;
};

NodalVolumeReport check_nodal_volume(const EigenPair& pair, const BallMode& mode_b);

struct ZeroTraceReport {
  double alpha = 0.0;
  double mean_abs_trace = 0.0;
  double ratio = 0.0;  // mean_abs_trace / alpha
  bool bounded_away = false;  // ratio > 0.1
};

/// Throws std::invalid_argument for a zero mode.
ZeroTraceReport check_zero_laplacian_trace(const EigenPair& pair);

}  // namespace clamped
