#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "clamped/domain.hpp"
#include "clamped/fdsolver.hpp"
#include "clamped/reduction.hpp"

namespace clamped {

/// Raised when the principal eigenvalue is too close to the second one for a
/// derivative of a simple eigenvalue to make sense.
class SpectralGapError : public std::runtime_error {
 public:
  explicit SpectralGapError(const std::string& what) : std::runtime_error(what) {}
};

/// Deformation field V for (id + t V) Omega.
///  dilation:    V(x) = x
///  translation: V(x) = (vx, vy)
///  normal_bump: V(x) = amplitude * phi(theta) * (x - c) / |x - c| where theta is
///               the polar angle about c and phi = cos^2 on |theta - theta0| < width.
struct VectorFieldSpec {
  enum class Kind { dilation, translation, normal_bump };
  Kind kind = Kind::dilation;
  double vx = 0.0, vy = 0.0;
  double theta = 0.0, width = 0.5, amplitude = 1.0;
  double cx = 0.0, cy = 0.0;

  static VectorFieldSpec dilation();
  static VectorFieldSpec translation(double vx, double vy);
  static VectorFieldSpec normal_bump(double theta, double width, double amplitude, double cx = 0.0, double cy = 0.0);

  void eval(double x, double y, double& out_x, double& out_y) const;
  /// Bound on |V| over the box, used to pad perturbed domains.
  double max_norm(const std::array<double, 4>& box) const;
};

/// Parses "dilation", "translation[:vx,vy]" or "bump:theta,width,amplitude".
VectorFieldSpec parse_vector_field(const std::string& text);
std::string describe(const VectorFieldSpec& v);

/// Mean node position of the mask.
std::array<double, 2> centroid(const GridDomain& domain);

/// Sum over boundary faces of h F(q) . e, F evaluated at the exterior node q
/// behind the face: the discrete boundary integral of F . n.
double boundary_flux(const GridDomain& domain, const std::vector<double>& weights, const VectorFieldSpec& v);

struct VolumeDerivative {
  double exact = 0.0;
  double finite_difference = 0.0;
  double step = 0.0;
};

/// exact = boundary flux of V; finite_difference = central difference of the
/// masked area of (id + t V) Omega at t = +-step (default 4h), on the same lattice.
VolumeDerivative volume_derivative(const DomainSpec& spec, const VectorFieldSpec& v, double step = 0.0);

struct EigenDerivativeReport {
  double eigenvalue = 0.0;
  double second_eigenvalue = 0.0;
  double formula_value = 0.0;  // -sum_faces h (Delta u)^2 V . e
  double fd_central = 0.0;     // step delta
  double fd_value = 0.0;       // Richardson-paired delta and 2 delta (rescaling: central)
  double step = 0.0;
  bool by_rescaling = false;
  /// Spread of Gamma over sub-cell shifts of the domain, divided by the step:
  /// the size of derivative the mask alone can fake.
  double fd_noise = 0.0;
  double relative_discrepancy = 0.0;
};

struct DerivativeOptions {
  double step = 0.0;  // 0: 4h for re-masking, 1e-3 for rescaling
  double min_relative_gap = 1e-3;
  bool estimate_noise = false;
};

/// Throws SpectralGapError when (Gamma_2 - Gamma_1) / Gamma_1 is below
/// options.min_relative_gap.
EigenDerivativeReport eigenvalue_derivative_check(const DomainSpec& spec, const VectorFieldSpec& v,
                                                  const DerivativeOptions& options = {});

struct GDerivativeReport {
  double eigenvalue = 0.0;
  double area = 0.0;
  /// [int 4 Gamma / (d |Omega|) V.n - int (Delta u)^2 V.n] |Omega|^2.
  double derivative = 0.0;
  /// The bracket divided by 4 Gamma / (d |Omega|) int |V.n|.
  double normalized = 0.0;
};

GDerivativeReport G_derivative_check(const DomainSpec& spec, const VectorFieldSpec& v,
                                     const DerivativeOptions& options = {});

/// Per-component statistics of (Delta u)^2 on the boundary, deviations
/// relative to each component mean.
std::vector<ComponentStats> boundary_constancy_scan(const EigenPair& pair);

}  // namespace clamped
