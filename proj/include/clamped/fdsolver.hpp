#pragma once

#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>
#include <vector>

#include "clamped/grid.hpp"

namespace clamped {

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// 5-point Laplacian on the interior nodes, zero extension outside (1/h^2 scaled).
SparseMatrix laplacian_matrix(const GridDomain& domain);

/// Clamped biharmonic operator. Exterior nodes hold u = 0; the second
/// exterior layer mirrors the interior through the first one (du/dn = 0).
/// Assembled in the symmetric form
///
///   <A u, u> = sum_interior (L u)^2 + 1/2 sum_ring_exterior (L u~)^2
///
/// where u~ carries the mirrored ghosts. On axis-aligned boundaries this is
/// exactly the ghost-reflected 13-point stencil.
SparseMatrix biharmonic_matrix(const GridDomain& domain);

struct EigenPair {
  double eigenvalue = 0.0;
  ScalarField mode;  // h^2 sum u^2 = 1, integral >= 0
};

struct EigenOptions {
  double tol = 1e-12;
  int max_iterations = 500;
  double shift = 0.0;
};

/// Smallest eigenvalue of the clamped biharmonic operator by inverse power
/// iteration on a sparse LDL^T factorisation. Throws SolverError on a
/// singular factorisation or non-convergence.
EigenPair principal_eigenpair(const DomainPtr& domain, const EigenOptions& options = {});

/// The `count` smallest eigenpairs by deflated inverse iteration.
std::vector<EigenPair> lowest_eigenpairs(const DomainPtr& domain, int count, const EigenOptions& options = {});

/// <A u, u> / <u, u>.
double rayleigh_quotient(const ScalarField& u);

/// -Delta_h u = f with u = 0 outside the interior.
ScalarField poisson_solve(const ScalarField& f);

/// Discrete harmonic function equal to `boundary_data` on the ring nodes.
ScalarField harmonic_extension(const DomainPtr& domain, const RingValues& boundary_data);

/// 5-point Laplacian with zero extension, at every interior node.
ScalarField laplacian_of(const ScalarField& field);

/// Boundary values of Delta u and of its outward normal derivative, one per
/// ring node. Near a staircase boundary Delta_h u carries O(1) noise that does
/// not shrink with h, so both come from a plane fitted to Delta_h u at nodes
/// at least 0.3 rho deep inside a window of radius rho = sqrt(h sqrt|Omega|)
/// around the boundary point half a cell outside the ring node.
struct BoundaryFit {
  RingValues value;
  RingValues normal_derivative;
};
BoundaryFit fit_boundary_laplacian(const ScalarField& u);
/// The same fit applied to an arbitrary field.
BoundaryFit fit_boundary_values(const ScalarField& f);
RingValues boundary_trace_of_laplacian(const ScalarField& u);
RingValues normal_derivative_of_laplacian(const ScalarField& u);

/// Delta_h u (zero extension) at the ring nodes themselves.
RingValues ring_laplacian(const ScalarField& u);

/// Ghost-extended Delta_h u at the exterior node behind each boundary face,
/// in domain.faces() order. The clamped condition makes this the discrete
/// Dirichlet trace of Delta u used by boundary integrals.
Eigen::VectorXd face_trace_of_laplacian(const ScalarField& u);

}  // namespace clamped
