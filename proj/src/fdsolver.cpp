#include "clamped/fdsolver.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>

namespace clamped {

namespace {

constexpr int kDirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
// Nodes closer to the boundary than this fraction of the fit radius are
// skipped: the staircase pollutes Delta_h u there.
constexpr double kFitDepth = 0.3;

using Triplets = std::vector<Eigen::Triplet<double>>;
using Factorization = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

// Ghost-extended Laplacian at the exterior nodes that touch the interior.
// Row r belongs to exterior node exterior[r].
struct GhostRows {
  std::vector<GridIndex> exterior;
  SparseMatrix matrix;
};

GhostRows ghost_rows(const GridDomain& domain) {
  std::map<std::pair<int, int>, int> row_of;
  GhostRows out;
  for (const auto& face : domain.faces()) {
    const auto p = domain.node(domain.ring()[face.ring].node);
    const std::pair<int, int> q{p.i + face.di, p.j + face.dj};
    if (row_of.emplace(q, static_cast<int>(out.exterior.size())).second) out.exterior.push_back({q.first, q.second});
  }
  const double inv_h2 = 1.0 / (domain.h() * domain.h());
  Triplets t;
  for (int r = 0; r < static_cast<int>(out.exterior.size()); ++r) {
    const auto q = out.exterior[r];
    for (const auto& dir : kDirs) {
      const int n = domain.index_of(q.i + dir[0], q.j + dir[1]);
      if (n < 0) continue;
      const bool mirrored = !domain.is_interior(q.i - dir[0], q.j - dir[1]);
      t.emplace_back(r, n, (mirrored ? 2.0 : 1.0) * inv_h2);
    }
  }
  out.matrix.resize(static_cast<int>(out.exterior.size()), domain.interior_count());
  out.matrix.setFromTriplets(t.begin(), t.end());
  return out;
}

void check_factorization(const Factorization& solver, const char* who) {
  if (solver.info() != Eigen::Success) throw SolverError(std::string(who) + ": factorisation failed");
}

void normalize_mode(ScalarField& u) {
  const double norm = u.l2_norm();
  if (!(norm > 0.0)) throw SolverError("eigensolver: zero iterate");
  u.values /= norm;
  if (u.values.sum() < 0.0) u.values = -u.values;
}

// Deterministic start vector with no symmetry the grid could share.
Eigen::VectorXd start_vector(const GridDomain& domain, int which) {
  Eigen::VectorXd v(domain.interior_count());
  for (int k = 0; k < domain.interior_count(); ++k) {
    if (which == 0) {
      v[k] = 1.0;
    } else {
      v[k] = 1.0 + std::sin(0.7 * which + 1.3 * domain.node(k).i) * std::cos(0.3 + 0.9 * which * domain.node(k).j);
    }
  }
  return v;
}

}  // namespace

SparseMatrix laplacian_matrix(const GridDomain& domain) {
  const double inv_h2 = 1.0 / (domain.h() * domain.h());
  Triplets t;
  t.reserve(static_cast<std::size_t>(domain.interior_count()) * 5);
  for (int k = 0; k < domain.interior_count(); ++k) {
    const auto p = domain.node(k);
    t.emplace_back(k, k, -4.0 * inv_h2);
    for (const auto& dir : kDirs) {
      const int n = domain.index_of(p.i + dir[0], p.j + dir[1]);
      if (n >= 0) t.emplace_back(k, n, inv_h2);
    }
  }
  SparseMatrix m(domain.interior_count(), domain.interior_count());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix biharmonic_matrix(const GridDomain& domain) {
  const SparseMatrix lap = laplacian_matrix(domain);
  const GhostRows ghost = ghost_rows(domain);
  SparseMatrix a = SparseMatrix(lap.transpose()) * lap;
  a += 0.5 * (SparseMatrix(ghost.matrix.transpose()) * ghost.matrix);
  a.prune(0.0);
  return a;
}

double rayleigh_quotient(const ScalarField& u) {
  const SparseMatrix a = biharmonic_matrix(*u.domain);
  return u.values.dot(a * u.values) / u.values.squaredNorm();
}

std::vector<EigenPair> lowest_eigenpairs(const DomainPtr& domain, int count, const EigenOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("eigensolver: tol must be positive");
  const SparseMatrix a = biharmonic_matrix(*domain);
  SparseMatrix shifted = a;
  if (options.shift != 0.0) {
    SparseMatrix id(a.rows(), a.cols());
    id.setIdentity();
    shifted -= options.shift * id;
  }
  const Factorization solver(shifted);
  check_factorization(solver, "eigensolver");

  std::vector<EigenPair> pairs;
  for (int which = 0; which < count; ++which) {
    Eigen::VectorXd x = start_vector(*domain, which);
    auto deflate = [&](Eigen::VectorXd& v) {
      for (const auto& p : pairs) {
        const Eigen::VectorXd& w = p.mode.values;
        v -= (w.dot(v) / w.squaredNorm()) * w;
      }
    };
    deflate(x);
    x.normalize();
    double lambda = x.dot(a * x);
    double last_residual = INFINITY;
    bool converged = false;
    for (int it = 0; it < options.max_iterations; ++it) {
      Eigen::VectorXd y = solver.solve(x);
      if (solver.info() != Eigen::Success || !y.allFinite()) throw SolverError("eigensolver: linear solve failed");
      deflate(y);
      x = y.normalized();
      const Eigen::VectorXd ax = a * x;
      const double next = x.dot(ax);
      const double residual = (ax - next * x).norm() / std::abs(next);
      const bool settled = std::abs(next - lambda) < options.tol * std::abs(next);
      lambda = next;
      // Keep going while the residual still drops fast: downstream identities
      // inherit it. Stagnation means it has hit the roundoff floor.
      const bool floor = residual < 1e-10 || residual > 0.5 * last_residual;
      last_residual = residual;
      if (settled && residual < std::sqrt(options.tol) && floor) {
        converged = true;
        break;
      }
    }
    if (!converged) throw SolverError("eigensolver: no convergence after " + std::to_string(options.max_iterations) + " iterations");
    EigenPair pair{lambda, ScalarField(domain, x)};
    normalize_mode(pair.mode);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

EigenPair principal_eigenpair(const DomainPtr& domain, const EigenOptions& options) {
  return std::move(lowest_eigenpairs(domain, 1, options).front());
}

ScalarField poisson_solve(const ScalarField& f) {
  const SparseMatrix neg_lap = -laplacian_matrix(*f.domain);
  const Factorization solver(neg_lap);
  check_factorization(solver, "poisson_solve");
  Eigen::VectorXd u = solver.solve(f.values);
  if (solver.info() != Eigen::Success || !u.allFinite()) throw SolverError("poisson_solve: linear solve failed");
  return ScalarField(f.domain, std::move(u));
}

ScalarField harmonic_extension(const DomainPtr& domain, const RingValues& boundary_data) {
  const auto& d = *domain;
  const auto ring = d.ring();
  if (boundary_data.size() != static_cast<Eigen::Index>(ring.size())) {
    throw std::invalid_argument("harmonic_extension: data size does not match the boundary ring");
  }
  if (!boundary_data.allFinite()) throw std::invalid_argument("harmonic_extension: non-finite boundary data");

  Eigen::VectorXd out = Eigen::VectorXd::Zero(d.interior_count());
  std::vector<int> unknown(d.interior_count(), -1);
  int n_unknown = 0;
  for (int k = 0; k < d.interior_count(); ++k) {
    const int pos = d.ring_position(k);
    if (pos >= 0) {
      out[k] = boundary_data[pos];
    } else {
      unknown[k] = n_unknown++;
    }
  }
  if (n_unknown == 0) return ScalarField(domain, std::move(out));

  Triplets t;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknown);
  for (int k = 0; k < d.interior_count(); ++k) {
    const int row = unknown[k];
    if (row < 0) continue;
    const auto p = d.node(k);
    t.emplace_back(row, row, 4.0);
    for (const auto& dir : kDirs) {
      // Non-ring nodes have all four neighbours inside.
      const int n = d.index_of(p.i + dir[0], p.j + dir[1]);
      if (unknown[n] >= 0) {
        t.emplace_back(row, unknown[n], -1.0);
      } else {
        rhs[row] += out[n];
      }
    }
  }
  SparseMatrix m(n_unknown, n_unknown);
  m.setFromTriplets(t.begin(), t.end());
  const Factorization solver(m);
  check_factorization(solver, "harmonic_extension");
  const Eigen::VectorXd interior = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !interior.allFinite()) throw SolverError("harmonic_extension: linear solve failed");
  for (int k = 0; k < d.interior_count(); ++k) {
    if (unknown[k] >= 0) out[k] = interior[unknown[k]];
  }
  return ScalarField(domain, std::move(out));
}

ScalarField laplacian_of(const ScalarField& field) {
  return ScalarField(field.domain, laplacian_matrix(*field.domain) * field.values);
}

Eigen::VectorXd face_trace_of_laplacian(const ScalarField& u) {
  const auto& d = *u.domain;
  const GhostRows ghost = ghost_rows(d);
  const Eigen::VectorXd at_exterior = ghost.matrix * u.values;
  std::map<std::pair<int, int>, int> row_of;
  for (int r = 0; r < static_cast<int>(ghost.exterior.size()); ++r) row_of[{ghost.exterior[r].i, ghost.exterior[r].j}] = r;
  const auto faces = d.faces();
  Eigen::VectorXd out(static_cast<Eigen::Index>(faces.size()));
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto p = d.node(d.ring()[faces[f].ring].node);
    out[static_cast<Eigen::Index>(f)] = at_exterior[row_of.at({p.i + faces[f].di, p.j + faces[f].dj})];
  }
  return out;
}

BoundaryFit fit_boundary_laplacian(const ScalarField& u) { return fit_boundary_values(laplacian_of(u)); }

BoundaryFit fit_boundary_values(const ScalarField& f) {
  const auto& d = *f.domain;
  const double h = d.h();
  const auto ring = d.ring();
  const double base = std::max(std::sqrt(h * std::sqrt(d.area())), 4.0 * h);
  BoundaryFit out;
  out.value = RingValues::Zero(static_cast<Eigen::Index>(ring.size()));
  out.normal_derivative = RingValues::Zero(out.value.size());
  for (std::size_t r = 0; r < ring.size(); ++r) {
    const auto& node = ring[r];
    const double bx = d.x(node.node) + 0.5 * h * node.nx;
    const double by = d.y(node.node) + 0.5 * h * node.ny;
    const auto centre = d.node(node.node);
    // Widen the window until the plane fit is well posed.
    for (double radius = base;; radius *= 1.5) {
      const int reach = static_cast<int>(std::ceil(radius / h)) + 1;
      std::vector<std::array<double, 3>> pts;
      for (int dj = -reach; dj <= reach; ++dj) {
        for (int di = -reach; di <= reach; ++di) {
          const int k = d.index_of(centre.i + di, centre.j + dj);
          if (k < 0) continue;
          const double x = d.x(k) - bx, y = d.y(k) - by;
          if (x * x + y * y > radius * radius) continue;
          if (-(x * node.nx + y * node.ny) < kFitDepth * radius) continue;
          pts.push_back({x / radius, y / radius, f.values[k]});
        }
      }
      Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), 3);
      Eigen::VectorXd b(a.rows());
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        a.row(i) << 1.0, pts[i][0], pts[i][1];
        b[i] = pts[i][2];
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
      if (pts.size() >= 6 && qr.rank() == 3) {
        const Eigen::Vector3d c = qr.solve(b);
        out.value[static_cast<Eigen::Index>(r)] = c[0];
        out.normal_derivative[static_cast<Eigen::Index>(r)] = (c[1] * node.nx + c[2] * node.ny) / radius;
        break;
      }
      if (radius > 64.0 * base) throw SolverError("boundary fit: no interior support near ring node");
    }
  }
  return out;
}

RingValues boundary_trace_of_laplacian(const ScalarField& u) { return fit_boundary_laplacian(u).value; }

RingValues normal_derivative_of_laplacian(const ScalarField& u) { return fit_boundary_laplacian(u).normal_derivative; }

RingValues ring_laplacian(const ScalarField& u) {
  const auto& d = *u.domain;
  const ScalarField lap = laplacian_of(u);
  RingValues out(static_cast<Eigen::Index>(d.ring().size()));
  for (std::size_t r = 0; r < d.ring().size(); ++r) out[static_cast<Eigen::Index>(r)] = lap.values[d.ring()[r].node];
  return out;
}

}  // namespace clamped
